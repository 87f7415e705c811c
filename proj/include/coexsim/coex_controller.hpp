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

#pragma once

#include <coexsim/ble_link.hpp>
#include <coexsim/calibration.hpp>
#include <coexsim/channel_power.hpp>
#include <coexsim/esb_link.hpp>
#include <coexsim/radio_arbiter.hpp>
#include <coexsim/sim_kernel.hpp>

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace coexsim {

enum class CoexMode : std::uint8_t { BleOnly, EsbOnly, Concurrent };
enum class Disposition : std::uint8_t { Standby, Shutdown };
enum class HandoverDirection : std::uint8_t { ToBle, ToEsb, BleAdjust, EsbAdjust };
enum class HandoverScenario : std::uint8_t { Concurrent, Standby, Shutdown };

std::string_view to_string(CoexMode mode) noexcept;
std::string_view to_string(HandoverDirection direction) noexcept;
std::string_view to_string(HandoverScenario scenario) noexcept;

struct HandoverRecord {
    SimTime command_time{};
    SimTime effective_time{};
    HandoverDirection direction = HandoverDirection::ToEsb;
    Micros latency{0};
};

struct AllocationDemand {
    Demand ble = Demand::none();
    Demand esb = Demand::none();
};

struct CoexOperatingRange {
    double ble_max_kbps = 0.0;
    double esb_max_at_ble_zero_kbps = 0.0;
};

struct HybridWakeupTimeline {
    SimTime wake{};
    SimTime t_esb_first_pkt{};
    SimTime t_ble_connected{};
    SimTime t_ble_discovery_done{};
    SimTime t_esb_stop{};
    bool gap_free = false;
};

struct SystemConfig {
    std::uint64_t seed = 1;
    BleConfig ble;
    EsbConfig esb;
    ChannelState channel;
    Calibration cal = default_calibration();
};

/// One device running both stacks on one radio, plus the Enhanced-BLE
/// control layer that decides which protocol carries the traffic.
class CoexSystem {
public:
    explicit CoexSystem(const SystemConfig& config);

    CoexSystem(const CoexSystem&) = delete;
    CoexSystem& operator=(const CoexSystem&) = delete;

    Kernel& kernel() noexcept { return kernel_; }
    RadioArbiter& arbiter() noexcept { return arbiter_; }
    PowerMeter& power() noexcept { return power_; }
    ChannelState& channel() noexcept { return channel_; }
    BleLink& ble() noexcept { return *ble_; }
    EsbLink& esb() noexcept { return *esb_; }
    const Calibration& calibration() const noexcept { return cal_; }

    CoexMode mode() const noexcept { return mode_; }
    Disposition disposition() const noexcept { return disposition_; }

    /// Steady state from now: the active protocol(s) running, the inactive one
    /// in `inactive` disposition. BLE's first anchor lands at `first_anchor`.
    void start(CoexMode mode, Disposition inactive = Disposition::Standby, std::optional<SimTime> first_anchor = {});

    /// Issues a handover command now. Throws IllegalTransition when the
    /// current mode does not match `scenario` or `direction`. The record is
    /// appended to handovers() once the change takes effect.
    void handover(HandoverDirection direction, HandoverScenario scenario, AllocationDemand after = {});
    const std::vector<HandoverRecord>& handovers() const noexcept { return handovers_; }

    /// Application demand per protocol, applied immediately.
    void set_demand(const AllocationDemand& demand);

    void set_txp(Protocol proto, double dbm);
    void set_phy(Protocol proto, Phy phy);

    /// From full sleep: ESB starts under the arbiter right away and carries
    /// `demand` until BLE finishes discovery plus the takeover delay.
    /// Runs the kernel until ESB has handed over.
    HybridWakeupTimeline hybrid_wakeup(Demand demand);

private:
    void apply(HandoverDirection direction, const AllocationDemand& after, SimTime command);
    void record(SimTime command, SimTime effective, HandoverDirection direction);
    Micros draw_esb_switch();

    Calibration cal_;
    Kernel kernel_;
    RadioArbiter arbiter_;
    PowerMeter power_;
    ChannelState channel_;
    std::unique_ptr<BleLink> ble_;
    std::unique_ptr<EsbLink> esb_;
    CoexMode mode_ = CoexMode::Concurrent;
    Disposition disposition_ = Disposition::Standby;
    std::vector<HandoverRecord> handovers_;
    AllocationDemand demand_;
};

/// Saturation endpoints at this connection interval (simulated).
/// Throws InvalidInterval.
CoexOperatingRange configure_coexistence(Micros ci, std::uint64_t seed = 1, Micros horizon = Micros{5000000});

struct SplitResult {
    double fwd_actual_kbps = 0.0;
    double rev_actual_kbps = 0.0;
    std::uint64_t rev_sent = 0;
    std::uint64_t rev_delivered = 0;
};

/// ESB carries forward, BLE carries reverse, CI 100 ms. A demand is feasible
/// when both directions reach at least 90% of it; otherwise throws Infeasible
/// carrying the rates the system actually reached.
SplitResult split_bidirectional(double fwd_demand_kbps, double rev_demand_kbps, std::uint64_t seed = 1,
                                Micros horizon = Micros{5000000});

}  // namespace coexsim
