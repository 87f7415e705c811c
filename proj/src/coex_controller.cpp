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

#include <coexsim/coex_controller.hpp>
#include <coexsim/error.hpp>

#include <fmt/format.h>

namespace coexsim {

std::string_view to_string(CoexMode mode) noexcept {
    switch (mode) {
        case CoexMode::BleOnly: return "ble-only";
        case CoexMode::EsbOnly: return "esb-only";
        case CoexMode::Concurrent: return "concurrent";
    }
    return "?";
}

std::string_view to_string(HandoverDirection direction) noexcept {
    switch (direction) {
        case HandoverDirection::ToBle: return "to-ble";
        case HandoverDirection::ToEsb: return "to-esb";
        case HandoverDirection::BleAdjust: return "ble-adjust";
        case HandoverDirection::EsbAdjust: return "esb-adjust";
    }
    return "?";
}

std::string_view to_string(HandoverScenario scenario) noexcept {
    switch (scenario) {
        case HandoverScenario::Concurrent: return "concurrent";
        case HandoverScenario::Standby: return "standby";
        case HandoverScenario::Shutdown: return "shutdown";
    }
    return "?";
}

CoexSystem::CoexSystem(const SystemConfig& config)
    : cal_(config.cal),
      kernel_(config.seed),
      arbiter_(kernel_, cal_.radio_switch),
      power_(cal_.power),
      channel_(config.channel) {
    channel_.ble_txp_dbm = config.ble.txp_dbm;
    channel_.esb_txp_dbm = config.esb.txp_dbm;
    ble_ = std::make_unique<BleLink>(kernel_, arbiter_, power_, cal_, channel_, config.ble);
    esb_ = std::make_unique<EsbLink>(kernel_, arbiter_, power_, cal_, channel_, config.esb);
}

void CoexSystem::start(CoexMode mode, Disposition inactive, std::optional<SimTime> first_anchor) {
    const SimTime now = kernel_.now();
    power_.set_awake(now, true);
    mode_ = mode;
    disposition_ = inactive;
    if (mode != CoexMode::EsbOnly || inactive == Disposition::Standby) {
        ble_->assume_connected(first_anchor.value_or(now));
        if (mode == CoexMode::EsbOnly) {
            ble_->enter_standby();
        }
    }
    if (mode != CoexMode::BleOnly || inactive == Disposition::Standby) {
        esb_->assume_active();
        if (mode == CoexMode::BleOnly) {
            esb_->standby();
        }
    }
}

void CoexSystem::set_demand(const AllocationDemand& demand) {
    demand_ = demand;
    ble_->set_fwd_demand(demand.ble);
    esb_->set_fwd_demand(demand.esb);
}

void CoexSystem::set_txp(Protocol proto, double dbm) {
    (proto == Protocol::Ble ? channel_.ble_txp_dbm : channel_.esb_txp_dbm) = dbm;
}

void CoexSystem::set_phy(Protocol proto, Phy phy) {
    if (proto == Protocol::Ble) {
        ble_->set_phy(phy);
    } else {
        esb_->set_phy(phy);
    }
}

Micros CoexSystem::draw_esb_switch() {
    return cal_.handover.esb_switch_base + kernel_.rng().uniform_below(cal_.handover.esb_switch_jitter);
}

void CoexSystem::record(SimTime command, SimTime effective, HandoverDirection direction) {
    handovers_.push_back({command, effective, direction, effective - command});
}

void CoexSystem::handover(HandoverDirection direction, HandoverScenario scenario, AllocationDemand after) {
    const SimTime now = kernel_.now();
    const bool concurrent = mode_ == CoexMode::Concurrent;
    const bool disposition_ok =
        (scenario == HandoverScenario::Standby && disposition_ == Disposition::Standby) ||
        (scenario == HandoverScenario::Shutdown && disposition_ == Disposition::Shutdown);
    auto illegal = [&] {
        throw IllegalTransition(fmt::format("{} handover is not possible in {} mode with {} scenario",
                                            to_string(direction), to_string(mode_), to_string(scenario)));
    };
    const HandoverParams& h = cal_.handover;

    switch (direction) {
        case HandoverDirection::EsbAdjust:
        case HandoverDirection::BleAdjust:
            if (!concurrent || scenario != HandoverScenario::Concurrent) {
                illegal();
            }
            break;
        case HandoverDirection::ToEsb:
            if (mode_ != CoexMode::BleOnly || !disposition_ok) {
                illegal();
            }
            break;
        case HandoverDirection::ToBle:
            if (mode_ != CoexMode::EsbOnly || !disposition_ok) {
                illegal();
            }
            break;
    }

    if (direction == HandoverDirection::ToEsb || direction == HandoverDirection::EsbAdjust) {
        const SimTime effective = now + draw_esb_switch();
        kernel_.schedule(effective, [this, direction, after, now] { apply(direction, after, now); });
    } else if (direction == HandoverDirection::BleAdjust) {
        // Rate changes land on the application's rate tick, then get processed.
        const std::int64_t tick = h.ble_rate_tick.count();
        const SimTime next_tick = at_us((us_of(now) / tick + 1) * tick);
        kernel_.schedule(next_tick + h.ble_adjust_processing,
                         [this, direction, after, now] { apply(direction, after, now); });
    } else if (scenario == HandoverScenario::Standby) {
        ble_->resume_at_next_anchor([this, after, now, extra = h.standby_ble_const](SimTime anchor) {
            if (extra.count() == 0) {
                apply(HandoverDirection::ToBle, after, now);
            } else {
                kernel_.schedule(anchor + extra, [this, after, now] { apply(HandoverDirection::ToBle, after, now); });
            }
        });
    } else {
        const Micros jitter = kernel_.rng().uniform_below(h.ble_reinit_jitter) - h.ble_reinit_jitter / 2;
        const Micros adv = kernel_.rng().uniform_below(ble_->config().advertising_interval);
        const SimTime effective = now + h.ble_reinit + jitter + adv;
        kernel_.schedule(effective, [this, after, now, effective] {
            ble_->assume_connected(effective);
            apply(HandoverDirection::ToBle, after, now);
        });
    }
}

void CoexSystem::apply(HandoverDirection direction, const AllocationDemand& after, SimTime command) {
    const SimTime now = kernel_.now();
    if (direction == HandoverDirection::ToEsb) {
        if (esb_->state() == EsbState::Standby) {
            esb_->activate();
        } else if (esb_->state() == EsbState::Sleep) {
            esb_->assume_active();
        }
        if (disposition_ == Disposition::Standby) {
            ble_->enter_standby();
        } else {
            ble_->shutdown();
        }
        mode_ = CoexMode::EsbOnly;
    } else if (direction == HandoverDirection::ToBle) {
        if (esb_->state() == EsbState::Active) {
            if (disposition_ == Disposition::Standby) {
                esb_->standby();
            } else {
                esb_->power_off();
            }
        }
        mode_ = CoexMode::BleOnly;
    }
    set_demand(after);
    record(command, now, direction);
}

HybridWakeupTimeline CoexSystem::hybrid_wakeup(Demand demand) {
    if (ble_->state() != BleState::Sleep || esb_->state() != EsbState::Sleep) {
        throw IllegalTransition("hybrid wake-up needs both protocols asleep");
    }
    HybridWakeupTimeline tl;
    tl.wake = kernel_.now();
    power_.set_awake(tl.wake, true);
    mode_ = CoexMode::Concurrent;
    disposition_ = Disposition::Standby;

    const SimTime esb_ready = esb_->init(true);
    esb_->set_fwd_demand(demand);
    const WarmupTimeline ble_tl = ble_->warmup();
    tl.t_ble_connected = ble_tl.connected;
    tl.t_ble_discovery_done = ble_tl.discovery_done;

    std::optional<SimTime> esb_stopped;
    ble_->set_connected_observer([&, demand](const WarmupTimeline&) {
        kernel_.schedule(kernel_.now() + cal_.warmup.takeover, [&, demand] {
            esb_->standby();
            esb_stopped = kernel_.now();
            ble_->set_fwd_demand(demand);
            mode_ = CoexMode::BleOnly;
        });
    });
    kernel_.run_until(ble_tl.discovery_done + cal_.warmup.takeover + Micros{1000});
    ble_->set_connected_observer({});

    tl.t_esb_first_pkt = esb_->first_delivery().value_or(SimTime::max());
    tl.t_esb_stop = esb_stopped.value_or(SimTime::max());
    // Someone can take data at every instant from the first ESB packet on:
    // ESB is up from esb_ready to its stop, and BLE is connected before that.
    SimTime ble_connected_at = SimTime::max();
    for (const StateChange& c : ble_->state_log()) {
        if (c.to == BleState::Connected) {
            ble_connected_at = c.at;
        }
    }
    tl.gap_free = esb_ready <= tl.t_esb_first_pkt && ble_connected_at <= tl.t_esb_stop &&
                  ble_->state() == BleState::Connected && esb_stopped.has_value();
    return tl;
}

CoexOperatingRange configure_coexistence(Micros ci, std::uint64_t seed, Micros horizon) {
    const Micros settle{1000000};
    if (horizon <= settle) {
        throw InvalidInterval("horizon must exceed the 1 s settling time");
    }
    SystemConfig cfg;
    cfg.seed = seed;
    cfg.ble.connection_interval = ci;
    cfg.ble.validate();
    CoexOperatingRange range;
    {
        CoexSystem sys(cfg);
        sys.start(CoexMode::Concurrent);
        sys.set_demand({Demand::saturated(), Demand::none()});
        sys.kernel().run_until(kTimeZero + horizon);
        range.ble_max_kbps = sys.ble().fwd_log().kbps(kTimeZero + settle, kTimeZero + horizon);
    }
    {
        CoexSystem sys(cfg);
        sys.start(CoexMode::Concurrent);
        sys.set_demand({Demand::none(), Demand::saturated()});
        sys.kernel().run_until(kTimeZero + horizon);
        range.esb_max_at_ble_zero_kbps = sys.esb().fwd_log().kbps(kTimeZero + settle, kTimeZero + horizon);
    }
    return range;
}

SplitResult split_bidirectional(double fwd_demand_kbps, double rev_demand_kbps, std::uint64_t seed, Micros horizon) {
    if (fwd_demand_kbps < 0.0 || rev_demand_kbps < 0.0) {
        throw OutOfRange("demands must be non-negative");
    }
    const Micros settle{1000000};
    SystemConfig cfg;
    cfg.seed = seed;
    cfg.ble.connection_interval = Micros{100000};
    CoexSystem sys(cfg);
    sys.start(CoexMode::Concurrent);
    sys.esb().set_fwd_demand(Demand::rate(fwd_demand_kbps));
    sys.ble().set_rev_demand(Demand::rate(rev_demand_kbps));
    sys.kernel().run_until(kTimeZero + horizon);

    SplitResult r;
    r.fwd_actual_kbps = sys.esb().fwd_log().kbps(kTimeZero + settle, kTimeZero + horizon);
    r.rev_actual_kbps = sys.ble().rev_log().kbps(kTimeZero + settle, kTimeZero + horizon);
    r.rev_sent = sys.ble().rev_log().sent_count();
    r.rev_delivered = sys.ble().rev_log().delivered_count();
    if (r.fwd_actual_kbps < 0.9 * fwd_demand_kbps || r.rev_actual_kbps < 0.9 * rev_demand_kbps) {
        throw Infeasible(fmt::format("({:.0f}, {:.0f}) kbps is outside the frontier; reached ({:.0f}, {:.0f})",
                                     fwd_demand_kbps, rev_demand_kbps, r.fwd_actual_kbps, r.rev_actual_kbps),
                         r.fwd_actual_kbps, r.rev_actual_kbps);
    }
    return r;
}

}  // namespace coexsim
