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

#include <coexsim/calibration.hpp>
#include <coexsim/phy.hpp>
#include <coexsim/time.hpp>

#include <cstdint>
#include <initializer_list>
#include <map>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace coexsim {

// ---- channel ---------------------------------------------------------------

struct ChannelState {
    double ble_attenuation_db = 41.0;
    double esb_attenuation_db = 39.0;
    double ble_txp_dbm = 8.0;
    double esb_txp_dbm = 8.0;

    double rssi(Protocol proto) const noexcept;
};

constexpr double rssi(double txp_dbm, double attenuation_db) noexcept { return txp_dbm - attenuation_db; }

/// Piecewise-linear curve through (x, y) anchors sorted by x, clamped to the
/// end values outside the anchor range.
class AnchorCurve {
public:
    AnchorCurve(std::initializer_list<std::pair<double, double>> anchors) : anchors_(anchors) {}
    explicit AnchorCurve(std::vector<std::pair<double, double>> anchors) : anchors_(std::move(anchors)) {}

    double operator()(double x) const noexcept;
    const std::vector<std::pair<double, double>>& anchors() const noexcept { return anchors_; }

private:
    std::vector<std::pair<double, double>> anchors_;
};

/// Probability that an ESB ACK (and its payload) never reaches the transmitter.
double ack_loss_prob(double rssi_dbm) noexcept;

/// Per-attempt probability that a forward packet is corrupted.
double forward_loss_prob(double rssi_dbm, Protocol proto, Phy phy) noexcept;

/// Fraction of nominal maximum throughput reachable at this RSSI.
double throughput_cap(double rssi_dbm, Protocol proto, Phy phy) noexcept;

// ---- power -----------------------------------------------------------------

enum class PowerState : std::uint8_t {
    Standby,
    BleOneShot,
    EsbOneShot,
    BleSetup,
    BleData,
    BleLow,
    EsbTx,
    BleInit,
    BleAdvertising,
    BleDiscovery,
    EsbInit,
};

/// Contribution of one state on top of sleep. Standby lifts sleep to the awake
/// floor; every other state adds its extra above that floor.
double state_power_mw(const PowerParams& params, PowerState state) noexcept;

/// sleep + sum of contributions of the active states.
double instantaneous_power(const PowerParams& params, std::span<const PowerState> active_states) noexcept;

/// Power levels are held in integer microwatts and time in microseconds, so
/// energies are exact integers in picojoules and sum without rounding error.
constexpr std::int64_t to_uw(double mw) noexcept {
    return static_cast<std::int64_t>(mw * 1000.0 + (mw >= 0 ? 0.5 : -0.5));
}

/// Piecewise-constant power over [start, end).
class PowerTrace {
public:
    struct Step {
        SimTime at;
        std::int64_t power_uw;
    };

    PowerTrace(SimTime start, SimTime end, std::vector<Step> steps);

    SimTime start() const noexcept { return start_; }
    SimTime end() const noexcept { return end_; }
    const std::vector<Step>& steps() const noexcept { return steps_; }

    double power_mw_at(SimTime t) const;

    /// Throws UncoveredInterval if [t0, t1] is not inside the trace.
    std::int64_t integrate_pj(SimTime t0, SimTime t1) const;
    double integrate_uj(SimTime t0, SimTime t1) const {
        return static_cast<double>(integrate_pj(t0, t1)) / 1e6;
    }
    double mean_power_mw(SimTime t0, SimTime t1) const;

    /// One sample per `period` starting at start(); the 10 us default mirrors
    /// a 100 kS/s current probe.
    std::vector<std::pair<SimTime, double>> samples(Micros period = Micros{10}) const;

    /// `time_us,power_mw` with three fractional digits.
    void write_csv(std::ostream& out, Micros period = Micros{10}) const;

private:
    SimTime start_;
    SimTime end_;
    std::vector<Step> steps_;
};

/// Collects power contributions while a simulation runs. Pulses may be added
/// in any order; the trace is assembled on demand.
class PowerMeter {
public:
    explicit PowerMeter(PowerParams params) : params_(params) {}

    const PowerParams& params() const noexcept { return params_; }

    /// Baseline from `t` on: Standby when awake, sleep otherwise.
    void set_awake(SimTime t, bool awake);

    void add(SimTime start, SimTime end, PowerState state);
    void add_mw(SimTime start, SimTime end, double extra_mw);

    PowerTrace trace(SimTime t0, SimTime t1) const;
    double energy_uj(SimTime t0, SimTime t1) const { return trace(t0, t1).integrate_uj(t0, t1); }

private:
    PowerParams params_;
    std::map<std::int64_t, std::int64_t> delta_uw_;
    std::map<std::int64_t, bool> awake_;
};

}  // namespace coexsim
