/*
 * Copyright 2026 The coexsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <coexsim/ble_link.hpp>
#include <coexsim/error.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace coexsim {

void BleConfig::validate() const {
    if (payload < 0 || payload > 244) {
        throw PayloadTooLarge(fmt::format("BLE payload {} B exceeds 244 B", payload));
    }
    if (connection_interval < Micros{7500} || connection_interval > Micros{4000000}) {
        throw InvalidInterval(fmt::format("connection interval {} us outside [7500, 4000000]",
                                          connection_interval.count()));
    }
    if (advertising_interval.count() <= 0 || scan_interval.count() <= 0) {
        throw InvalidInterval("advertising and scan intervals must be positive");
    }
    require_supported(Protocol::Ble, phy);
}

std::string_view to_string(BleState state) noexcept {
    switch (state) {
        case BleState::Sleep: return "sleep";
        case BleState::Init: return "init";
        case BleState::Advertising: return "advertising";
        case BleState::Connecting: return "connecting";
        case BleState::ServiceDiscovery: return "service-discovery";
        case BleState::Connected: return "connected";
        case BleState::Standby: return "standby";
        case BleState::Shutdown: return "shutdown";
    }
    return "?";
}

bool is_legal_transition(BleState from, BleState to) noexcept {
    using S = BleState;
    switch (to) {
        case S::Init: return from == S::Sleep || from == S::Shutdown;
        case S::Advertising: return from == S::Init;
        case S::Connecting: return from == S::Advertising;
        case S::ServiceDiscovery: return from == S::Connecting;
        case S::Connected: return from == S::ServiceDiscovery || from == S::Standby;
        case S::Standby: return from == S::Connected;
        case S::Sleep: return from == S::Connected || from == S::Standby;
        case S::Shutdown: return from != S::Sleep && from != S::Shutdown;
    }
    return false;
}

Micros ble_event_duration(int payload, Phy phy, const BleTiming& timing) {
    if (payload > timing.max_app_payload) {
        throw PayloadTooLarge(fmt::format("BLE payload {} B exceeds {} B", payload, timing.max_app_payload));
    }
    require_supported(Protocol::Ble, phy);
    const double air = payload * 8.0 / bits_per_us(phy);
    return timing.event_overhead + Micros{static_cast<std::int64_t>(std::llround(air))};
}

Micros ble_pdu_airtime(int bytes, Phy phy, const BleTiming& timing) {
    const bool coded = phy == Phy::CodedS8;
    if (bytes <= 0) {
        return coded ? timing.coded_empty_pdu : timing.empty_pdu;
    }
    const Micros header = coded ? timing.coded_pdu_header : timing.pdu_header;
    return header + Micros{static_cast<std::int64_t>(std::llround(bytes * 8.0 / bits_per_us(phy)))};
}

int ble_max_ll_payload(Phy phy, const BleTiming& timing) {
    if (phy != Phy::CodedS8) {
        return timing.max_ll_payload;
    }
    const double room = static_cast<double>((timing.coded_max_pdu_time - timing.coded_pdu_header).count());
    return std::min(timing.max_ll_payload, static_cast<int>(room * bits_per_us(phy) / 8.0));
}

Micros ble_exchange_window(Micros connection_interval, const BleTiming& timing) {
    return std::max(Micros{0}, connection_interval - timing.event_setup - timing.event_guard);
}

WarmupTimeline plan_ble_warmup(const BleConfig& config, const WarmupParams& p, SimTime wake, Micros adv_wait) {
    WarmupTimeline tl;
    tl.wake = wake;
    tl.init_done = wake + p.ble_init;
    tl.adv_done = tl.init_done + adv_wait + p.scan_response;
    tl.connected = tl.adv_done + p.connect_fixed + p.connect_intervals * config.connection_interval;
    tl.discovery_done = tl.connected + p.discovery_fixed + p.discovery_intervals * config.connection_interval;
    return tl;
}

BleLink::BleLink(Kernel& kernel, RadioArbiter& arbiter, PowerMeter& power, const Calibration& cal,
                 const ChannelState& channel, BleConfig config)
    : kernel_(kernel),
      arbiter_(arbiter),
      power_(power),
      cal_(cal),
      channel_(channel),
      config_(config),
      fwd_(config.payload),
      rev_(config.payload) {
    config_.validate();
}

void BleLink::set_state(BleState to) {
    state_log_.push_back({kernel_.now(), state_, to});
    state_ = to;
}

void BleLink::transition(BleState to) {
    if (!is_legal_transition(state_, to)) {
        throw IllegalTransition(
            fmt::format("BLE cannot go from {} to {}", to_string(state_), to_string(to)));
    }
    set_state(to);
}

WarmupTimeline BleLink::warmup(std::optional<Micros> adv_wait) {
    if (state_ != BleState::Sleep && state_ != BleState::Shutdown) {
        throw IllegalTransition(fmt::format("BLE warm-up needs sleep or shutdown, not {}", to_string(state_)));
    }
    const Micros wait = adv_wait.value_or(kernel_.rng().uniform_below(config_.advertising_interval));
    const WarmupTimeline tl = plan_ble_warmup(config_, cal_.warmup, kernel_.now(), wait);
    transition(BleState::Init);
    power_.add(tl.wake, tl.init_done, PowerState::BleInit);
    power_.add(tl.init_done, tl.adv_done, PowerState::BleAdvertising);
    power_.add(tl.adv_done, tl.connected, PowerState::BleInit);
    power_.add(tl.connected, tl.discovery_done, PowerState::BleDiscovery);
    warmup_events_.clear();
    warmup_events_.push_back(kernel_.schedule(tl.init_done, [this] { transition(BleState::Advertising); }));
    warmup_events_.push_back(kernel_.schedule(tl.adv_done, [this] { transition(BleState::Connecting); }));
    warmup_events_.push_back(kernel_.schedule(tl.connected, [this] { transition(BleState::ServiceDiscovery); }));
    warmup_events_.push_back(kernel_.schedule(tl.discovery_done, [this, tl] {
        transition(BleState::Connected);
        last_data_event_.reset();
        anchors_running_ = true;
        schedule_anchor(tl.discovery_done);
        if (connected_observer_) {
            connected_observer_(tl);
        }
    }));
    return tl;
}

void BleLink::assume_connected(SimTime first_anchor) {
    for (BleState s : {BleState::Init, BleState::Advertising, BleState::Connecting, BleState::ServiceDiscovery,
                       BleState::Connected}) {
        transition(s);
    }
    anchors_running_ = true;
    schedule_anchor(first_anchor);
}

void BleLink::enter_standby() { transition(BleState::Standby); }

void BleLink::resume() { transition(BleState::Connected); }

void BleLink::resume_at_next_anchor(std::function<void(SimTime)> on_effective) {
    if (state_ != BleState::Standby) {
        throw IllegalTransition(fmt::format("BLE resume needs standby, not {}", to_string(state_)));
    }
    pending_resume_.emplace(kernel_.now(), std::move(on_effective));
}

void BleLink::shutdown() {
    transition(BleState::Shutdown);
    for (const EventHandle& h : warmup_events_) {
        kernel_.cancel(h);
    }
    warmup_events_.clear();
    anchors_running_ = false;
    if (anchor_event_) {
        kernel_.cancel(*anchor_event_);
        anchor_event_.reset();
    }
    arbiter_.release_anchors_after(kernel_.now());
    next_anchor_.reset();
}

void BleLink::sleep() {
    transition(BleState::Sleep);
    anchors_running_ = false;
    if (anchor_event_) {
        kernel_.cancel(*anchor_event_);
        anchor_event_.reset();
    }
    arbiter_.release_anchors_after(kernel_.now());
    next_anchor_.reset();
}

void BleLink::set_phy(Phy phy) {
    require_supported(Protocol::Ble, phy);
    config_.phy = phy;
}

void BleLink::set_connection_interval(Micros ci) {
    BleConfig next = config_;
    next.connection_interval = ci;
    next.validate();
    config_ = next;
}

Micros BleLink::nominal_event() const {
    const Micros empty = ble_pdu_airtime(0, config_.phy, cal_.ble);
    return cal_.ble.event_setup + empty + cal_.ble.ifs + empty;
}

void BleLink::schedule_anchor(SimTime at) {
    const RadioSlot slot = arbiter_.reserve_anchor(at, nominal_event());
    next_anchor_ = at;
    anchor_event_ = kernel_.schedule(at, [this, id = slot.id, at] { on_anchor(id, at); });
}

void BleLink::on_anchor(std::uint64_t anchor_id, SimTime at) {
    anchor_event_.reset();
    if (!anchors_running_) {
        return;
    }
    if (pending_resume_ && at > pending_resume_->first) {
        auto cb = std::move(pending_resume_->second);
        pending_resume_.reset();
        transition(BleState::Connected);
        if (cb) {
            cb(at);
        }
    }
    fwd_.accrue(at);
    rev_.accrue(at);
    const RadioSlot slot = *arbiter_.slot(anchor_id);
    run_connection_event(slot);
    const ConnectionEventRecord& rec = events_.back();
    arbiter_.resize_anchor(anchor_id, at + rec.duration);
    if (anchor_observer_) {
        anchor_observer_(at);
    }
    kernel_.schedule(at + rec.duration, [this, at] {
        if (anchors_running_ && !anchor_event_) {
            schedule_anchor(std::max(at + config_.connection_interval, kernel_.now()));
        }
    });
}

std::vector<PduExchange> BleLink::run_connection_event(const RadioSlot& anchor) {
    const BleTiming& tm = cal_.ble;
    const SimTime t = anchor.start;
    const Phy phy = config_.phy;
    const Micros window = ble_exchange_window(config_.connection_interval, tm);
    const Micros empty = ble_pdu_airtime(0, phy, tm);
    const int max_ll = ble_max_ll_payload(phy, tm);
    const double loss = forward_loss_prob(channel_.rssi(Protocol::Ble), Protocol::Ble, phy);
    const bool connected = state_ == BleState::Connected;
    Rng& rng = kernel_.rng();

    auto pending_pdus = [&](const PacketQueue& q) -> std::int64_t {
        if (q.demand().saturate) {
            return std::numeric_limits<std::int64_t>::max() / 4;
        }
        if (max_ll >= q.packet_bytes()) {
            return static_cast<std::int64_t>(q.size());
        }
        return q.backlog_bytes() / max_ll + static_cast<std::int64_t>(q.size());
    };
    auto next_fragment = [&](PacketQueue& q) { return std::min(q.front().bytes - q.front().sent, max_ll); };

    const bool has_data = connected && (!fwd_.empty() || !rev_.empty());
    const bool one_shot = has_data && (!last_data_event_ || t - *last_data_event_ >= kColdGap);

    std::vector<PduExchange> exchanges;
    std::vector<std::pair<Micros, PowerState>> pieces;  // (length, state) after setup
    Micros used{0};
    bool fwd_retx = false;
    bool rev_retx = false;
    while (connected) {
        const Micros room = window - used;
        const bool fwd_avail = !fwd_.empty();
        const bool rev_avail = !rev_.empty();
        int f = 0;
        int r = 0;
        if (fwd_avail) {
            f = next_fragment(fwd_);
            const Micros c_f = ble_pdu_airtime(f, phy, tm) + tm.ifs + empty + tm.ifs;
            if (room < c_f) {
                break;
            }
            const std::int64_t nf = std::min<std::int64_t>(pending_pdus(fwd_), room / c_f);
            const Micros leftover = room - nf * c_f;
            if (rev_avail) {
                const int rb = next_fragment(rev_);
                const Micros pig = ble_pdu_airtime(rb, phy, tm) - empty;
                if (leftover >= pig) {
                    r = rb;
                }
            }
        } else if (rev_avail) {
            r = next_fragment(rev_);
            if (room < empty + tm.ifs + ble_pdu_airtime(r, phy, tm) + tm.ifs) {
                break;
            }
        } else {
            break;
        }

        PduExchange ex;
        ex.fwd_bytes = f;
        ex.rev_bytes = r;
        ex.retransmitted = (f > 0 && fwd_retx) || (r > 0 && rev_retx);
        const Micros fwd_air = ble_pdu_airtime(f, phy, tm);
        const Micros rev_air = ble_pdu_airtime(r, phy, tm);
        ex.airtime = fwd_air + tm.ifs + rev_air + tm.ifs;
        const SimTime done = t + tm.event_setup + used + fwd_air + tm.ifs + rev_air;
        if (f > 0) {
            Packet& p = fwd_.front();
            const std::uint64_t key = (p.seq << 12) | static_cast<std::uint64_t>(p.fragment);
            fwd_log_.sent(key);
            ex.fwd_delivered = !rng.bernoulli(loss);
            fwd_retx = !ex.fwd_delivered;
            if (ex.fwd_delivered) {
                fwd_log_.deliver(key, f, done);
                p.sent += f;
                ++p.fragment;
                fwd_.note_sent(f);
                if (p.sent >= p.bytes) {
                    fwd_.pop();
                }
            }
        }
        if (r > 0) {
            Packet& p = rev_.front();
            const std::uint64_t key = (p.seq << 12) | static_cast<std::uint64_t>(p.fragment);
            rev_log_.sent(key);
            ex.rev_delivered = !rng.bernoulli(loss);
            rev_retx = !ex.rev_delivered;
            if (ex.rev_delivered) {
                rev_log_.deliver(key, r, done);
                p.sent += r;
                ++p.fragment;
                rev_.note_sent(r);
                if (p.sent >= p.bytes) {
                    rev_.pop();
                }
            }
        }
        pieces.emplace_back(fwd_air, f > 0 ? PowerState::BleData : PowerState::BleLow);
        pieces.emplace_back(tm.ifs, PowerState::BleLow);
        pieces.emplace_back(rev_air, r > 0 ? PowerState::BleData : PowerState::BleLow);
        pieces.emplace_back(tm.ifs, PowerState::BleLow);
        used += ex.airtime;
        exchanges.push_back(ex);
    }

    if (exchanges.empty()) {
        pieces = {{empty, PowerState::BleLow}, {tm.ifs, PowerState::BleLow}, {empty, PowerState::BleLow},
                  {tm.ifs, PowerState::BleLow}};
    }
    pieces.pop_back();  // no turnaround after the last PDU
    Micros duration = tm.event_setup;
    for (const auto& [len, st] : pieces) {
        duration += len;
    }

    if (one_shot) {
        power_.add(t, t + duration, PowerState::BleOneShot);
    } else {
        power_.add(t, t + tm.event_setup, PowerState::BleSetup);
        SimTime cursor = t + tm.event_setup;
        for (const auto& [len, st] : pieces) {
            power_.add(cursor, cursor + len, st);
            cursor += len;
        }
    }
    if (!exchanges.empty()) {
        last_data_event_ = t;
    }
    events_.push_back({t, duration, static_cast<int>(exchanges.size()), one_shot});
    return exchanges;
}

}  // namespace coexsim
