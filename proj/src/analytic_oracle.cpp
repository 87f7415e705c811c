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

#include <coexsim/analytic_oracle.hpp>
#include <coexsim/error.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>

namespace coexsim::oracle {
namespace {

void check_m(double m, const AckCapacityModel& model) {
    if (!(m >= 0.0 && m <= model.max_payload)) {
        throw OutOfRange(fmt::format("ACK payload {} outside [0, {}]", m, model.max_payload));
    }
}

// Shared-capacity frontiers: C(7.5 ms) is flat at 1100 kbps aggregate; at
// 100 ms reverse falls 0.91 kbps per forward kbps from 1350.
struct Frontier {
    double rev_at_zero;
    double slope;
};

Frontier frontier_for(double ci_us) {
    if (std::abs(ci_us - 7500.0) < 0.5) {
        return {1100.0, -1.0};
    }
    if (std::abs(ci_us - 100000.0) < 0.5) {
        return {1350.0, -0.91};
    }
    throw OutOfRange(fmt::format("no BLE frontier for CI {} us", ci_us));
}

}  // namespace

double k_of_m(double m, const AckCapacityModel& model) {
    check_m(m, model);
    return m / model.max_payload;
}

double f_max(double m, const AckCapacityModel& model) {
    check_m(m, model);
    return model.fwd_numerator / (m + model.overhead_bytes_equiv);
}

double r_max(double m, const AckCapacityModel& model) {
    check_m(m, model);
    return model.rev_numerator * m / (m + model.overhead_bytes_equiv);
}

std::pair<double, double> linear_fit(const std::vector<std::pair<double, double>>& points) {
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (points.size() < 2 || sxx == 0.0) {
        throw DegenerateFit("need at least two distinct x values");
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

OverheadFit fit_overhead(const std::vector<std::pair<double, double>>& points) {
    std::set<double> distinct;
    std::vector<std::pair<double, double>> inv;
    for (const auto& [m, f] : points) {
        if (!(f > 0.0)) {
            throw DegenerateFit("throughput must be positive");
        }
        distinct.insert(m);
        inv.emplace_back(m, 1.0 / f);
    }
    if (distinct.size() < 2) {
        throw DegenerateFit("need at least two distinct ACK payload sizes");
    }
    const auto [slope, intercept] = linear_fit(inv);
    if (!(slope > 0.0)) {
        throw DegenerateFit("throughput does not fall with ACK payload");
    }
    const double a = 1.0 / slope;
    return {a, intercept * a};
}

double ble_aggregate(double fwd_kbps, double ci_us) {
    const Frontier fr = frontier_for(ci_us);
    const double fwd_limit = fr.rev_at_zero / -fr.slope;
    if (fwd_kbps < 0.0 || fwd_kbps > fwd_limit + 1e-9) {
        throw OutOfRange(fmt::format("forward {} kbps outside [0, {}]", fwd_kbps, fwd_limit));
    }
    return std::max(0.0, fr.rev_at_zero + fr.slope * fwd_kbps);
}

}  // namespace coexsim::oracle
