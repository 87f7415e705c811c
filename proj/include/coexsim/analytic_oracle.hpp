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

#include <utility>
#include <vector>

namespace coexsim::oracle {

/// Closed-form ACK-payload capacity model (bytes in, kbps out).
struct AckCapacityModel {
    int max_payload = 252;
    double overhead_bytes_equiv = 370.0;
    double fwd_numerator = 835000.0;
    double rev_numerator = 3408.0;
};

/// Throw OutOfRange unless 0 <= M <= max_payload.
double k_of_m(double m, const AckCapacityModel& model = {});
double f_max(double m, const AckCapacityModel& model = {});
double r_max(double m, const AckCapacityModel& model = {});

struct OverheadFit {
    double numerator;
    double overhead;
};

/// Least-squares fit of F = A / (M + B) through the linearisation
/// 1/F = M/A + B/A. Throws DegenerateFit with fewer than two distinct M.
OverheadFit fit_overhead(const std::vector<std::pair<double, double>>& points);

struct LinearPowerModel {
    double idle_mw;
    double slope_mw_per_kbps;

    double power_mw(double kbps) const noexcept { return idle_mw + slope_mw_per_kbps * kbps; }
};

inline constexpr LinearPowerModel kBlePower{0.99, 0.017};
inline constexpr LinearPowerModel kEsbPower{0.55, 0.013};

/// Largest reverse rate BLE can carry next to `fwd_kbps` forward at this CI.
/// Throws OutOfRange if fwd exceeds the frontier or is negative.
double ble_aggregate(double fwd_kbps, double ci_us);

/// Ordinary least-squares slope and intercept.
std::pair<double, double> linear_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace coexsim::oracle
