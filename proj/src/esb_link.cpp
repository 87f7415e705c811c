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

#include <coexsim/error.hpp>
#include <coexsim/esb_link.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace coexsim {

void EsbConfig::validate() const {
    if (payload < 0 || payload > 252) {
        throw PayloadTooLarge(fmt::format("ESB payload {} B exceeds 252 B", payload));
    }
    if (ack_payload < 0 || ack_payload > 252) {
        throw PayloadTooLarge(fmt::format("ESB ACK payload {} B exceeds 252 B", ack_payload));
    }
    if (retransmit_delay.count() < 0 || max_retries < 0) {
        throw OutOfRange("retransmit delay and retry count must be non-negative");
    }
    require_supported(Protocol::Esb, phy);
}

std::string_view to_string(TxOutcome outcome) noexcept {
    switch (outcome) {
        case TxOutcome::AckedOk: return "acked";
        case TxOutcome::AckLost: return "ack-lost";
        case TxOutcome::Failed: return "failed";
        case TxOutcome::Preempted: return "preempted";
    }
    return "?";
}

std::string_view to_string(EsbState state) noexcept {
    switch (state) {
        case EsbState::Sleep: return "sleep";
        case EsbState::Init: return "init";
        case EsbState::Active: return "active";
        case EsbState::Standby: return "standby";
    }
    return "?";
}

double audit_ack_loss(const AckAudit& audit) {
    if (audit.expected_seqs.empty()) {
        throw EmptyAudit("no ACKs were expected");
    }
    std::size_t missing = 0;
    for (std::uint64_t s : audit.expected_seqs) {
        missing += audit.received_seqs.contains(s) ? 0 : 1;
    }
    return static_cast<double>(missing) / static_cast<double>(audit.expected_seqs.size());
}

namespace {

Micros round_us(double us) { return Micros{static_cast<std::int64_t>(std::llround(us))}; }

}  // namespace

Micros esb_event_duration(int payload, int ack_payload, Phy phy, const EsbTiming& t) {
    if (payload < 0 || payload > t.max_payload || ack_payload < 0 || ack_payload > t.max_payload) {
        throw PayloadTooLarge(fmt::format("ESB payload {}/{} B exceeds {} B", payload, ack_payload, t.max_payload));
    }
    require_supported(Protocol::Esb, phy);
    const double rate = bits_per_us(phy);
    const double header_4m = t.header_bytes_equiv * 8.0 / 4.0;
    const double overhead = static_cast<double>(t.overhead_4m.count()) - header_4m + t.header_bytes_equiv * 8.0 / rate;
    return round_us((payload + ack_payload) * 8.0 / rate + overhead);
}

Micros esb_attempt_duration(int payload, int ack_payload, Phy phy, const EsbTiming& t) {
    return esb_event_duration(payload, ack_payload, phy, t) + round_us(ack_payload * t.ack_prep_ns_per_byte / 1000.0);
}

Micros esb_streaming_period(int payload, int ack_payload, Phy phy, const EsbTiming& t) {
    return esb_attempt_duration(payload, ack_payload, phy, t) + t.tx_gap;
}

EsbLink::EsbLink(Kernel& kernel, RadioArbiter& arbiter, PowerMeter& power, const Calibration& cal,
                 const ChannelState& channel, EsbConfig config)
    : kernel_(kernel),
      arbiter_(arbiter),
      power_(power),
      cal_(cal),
      channel_(channel),
      config_(config),
      fwd_(config.payload),
      rev_(std::max(config.ack_payload, 1)) {
    config_.validate();
    rev_.set_demand(Demand::saturated(), kernel_.now());
}

SimTime EsbLink::init(bool under_arbiter) {
    if (state_ != EsbState::Sleep) {
        throw IllegalTransition(fmt::format("ESB init needs sleep, not {}", to_string(state_)));
    }
    state_ = EsbState::Init;
    const Micros dur = cal_.warmup.esb_init + (under_arbiter ? cal_.warmup.mpsl_extra_init : Micros{0});
    const SimTime ready = kernel_.now() + dur;
    power_.add(kernel_.now(), ready, PowerState::EsbInit);
    kernel_.schedule(ready, [this] {
        state_ = EsbState::Active;
        last_tx_end_.reset();
        pump();
    });
    return ready;
}

void EsbLink::assume_active() {
    state_ = EsbState::Active;
    kernel_.schedule(kernel_.now(), [this] { pump(); });
}

void EsbLink::standby() {
    if (state_ != EsbState::Active) {
        throw IllegalTransition(fmt::format("ESB standby needs active, not {}", to_string(state_)));
    }
    state_ = EsbState::Standby;
}

void EsbLink::activate() {
    if (state_ != EsbState::Standby) {
        throw IllegalTransition(fmt::format("ESB activate needs standby, not {}", to_string(state_)));
    }
    state_ = EsbState::Active;
    kernel_.schedule(kernel_.now(), [this] { pump(); });
}

void EsbLink::power_off() {
    state_ = EsbState::Sleep;
    if (wake_) {
        kernel_.cancel(*wake_);
        wake_.reset();
    }
}

void EsbLink::set_fwd_demand(Demand demand) {
    fwd_.set_demand(demand, kernel_.now());
    if (state_ == EsbState::Active && !current_) {
        wake_at(kernel_.now());
    }
}

void EsbLink::offer_fwd(int bytes) {
    fwd_.push(bytes);
    if (state_ == EsbState::Active && !current_) {
        wake_at(kernel_.now());
    }
}

void EsbLink::set_phy(Phy phy) {
    require_supported(Protocol::Esb, phy);
    config_.phy = phy;
}

void EsbLink::set_ack_payload(int bytes) {
    EsbConfig next = config_;
    next.ack_payload = bytes;
    next.validate();
    config_ = next;
    rev_.set_packet_bytes(std::max(bytes, 1));
}

AckAudit EsbLink::ack_audit() const { return AckAudit{ack_expected_, ack_received_}; }

void EsbLink::wake_at(SimTime t) {
    if (wake_) {
        kernel_.cancel(*wake_);
    }
    wake_ = kernel_.schedule(t, [this] {
        wake_.reset();
        pump();
    });
}

void EsbLink::pump() {
    if (state_ != EsbState::Active || current_) {
        return;
    }
    const SimTime now = kernel_.now();
    fwd_.accrue(now);
    rev_.accrue(now);
    if (fwd_.empty()) {
        if (auto next = fwd_.next_arrival(now)) {
            wake_at(*next);
        }
        return;
    }
    const Packet& p = fwd_.front();
    Transaction tx;
    tx.seq = p.seq;
    tx.fwd_bytes = p.bytes;
    tx.ack_bytes = (config_.ack_payload > 0 && !rev_.empty()) ? config_.ack_payload : 0;
    current_ = tx;
    delivered_current_ = false;
    current_one_shot_ = !last_tx_end_ || now - *last_tx_end_ >= kColdGap;
    attempt();
}

void EsbLink::attempt() {
    if (!current_) {
        return;
    }
    if (state_ != EsbState::Active) {
        current_.reset();  // packet stays queued
        return;
    }
    const Micros dur = esb_attempt_duration(current_->fwd_bytes, current_->ack_bytes, config_.phy, cal_.esb);
    const Grant g = arbiter_.request_slot(
        SlotRequest{Protocol::Esb, kernel_.now(), dur, Priority::Opportunistic},
        [this](const RadioSlot& s) { on_attempt_end(s, false); },
        [this](const RadioSlot& s) { on_attempt_end(s, true); });
    if (const auto* blocked = std::get_if<Blocked>(&g)) {
        kernel_.schedule(blocked->retry_at, [this] { attempt(); });
        return;
    }
    current_->attempt_starts.push_back(std::get<RadioSlot>(g).start);
}

void EsbLink::on_attempt_end(const RadioSlot& slot, bool preempted) {
    Transaction& tx = *current_;
    tx.attempt_ends.push_back(slot.end);
    tx.airtime += slot.end - slot.start;
    power_.add(slot.start, slot.end, current_one_shot_ ? PowerState::EsbOneShot : PowerState::EsbTx);
    const int attempt_index = static_cast<int>(tx.attempt_starts.size()) - 1;

    auto retry_or = [&](TxOutcome give_up) {
        if (tx.retries_used < config_.max_retries) {
            ++tx.retries_used;
            kernel_.schedule(slot.end + config_.retransmit_delay, [this] { attempt(); });
        } else {
            finish(give_up, slot.end);
        }
    };

    if (preempted) {
        retry_or(delivered_current_ ? TxOutcome::AckLost : TxOutcome::Preempted);
        return;
    }
    const double rssi = channel_.rssi(Protocol::Esb);
    bool lost = kernel_.rng().bernoulli(forward_loss_prob(rssi, Protocol::Esb, config_.phy));
    if (loss_override_) {
        if (auto forced = loss_override_(tx.seq, attempt_index)) {
            lost = *forced;
        }
    }
    if (lost) {
        retry_or(delivered_current_ ? TxOutcome::AckLost : TxOutcome::Failed);
        return;
    }
    delivered_current_ = true;
    if (fwd_log_.deliver(tx.seq, tx.fwd_bytes, slot.end)) {
        if (!first_delivery_) {
            first_delivery_ = slot.end;
        }
        if (delivery_observer_) {
            delivery_observer_(slot.end);
        }
    }
    fwd_log_.sent(tx.seq);
    ack_expected_.insert(tx.seq);
    if (kernel_.rng().bernoulli(ack_loss_prob(rssi))) {
        if (config_.retry_on_ack_loss) {
            retry_or(TxOutcome::AckLost);
        } else {
            finish(TxOutcome::AckLost, slot.end);
        }
        return;
    }
    ack_received_.insert(tx.seq);
    if (tx.ack_bytes > 0) {
        const Packet& r = rev_.front();
        ack_log_.sent(r.seq);
        ack_log_.deliver(r.seq, tx.ack_bytes, slot.end);
        rev_.pop();
    }
    finish(TxOutcome::AckedOk, slot.end);
}

void EsbLink::finish(TxOutcome outcome, SimTime at) {
    Transaction tx = *current_;
    tx.outcome = outcome;
    fwd_log_.sent(tx.seq);
    fwd_.pop();
    done_.push_back(std::move(tx));
    if (!current_one_shot_) {
        power_.add(at, at + cal_.esb.tx_gap, PowerState::EsbTx);
    }
    last_tx_end_ = at;
    current_.reset();
    wake_at(at + cal_.esb.tx_gap);
}

}  // namespace coexsim
