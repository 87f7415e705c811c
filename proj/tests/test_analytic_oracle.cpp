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
#include <coexsim/esb_link.hpp>

#include <gtest/gtest.h>

using namespace coexsim;
using namespace coexsim::oracle;

TEST(Oracle, KOfM) {
    EXPECT_EQ(k_of_m(252), 1.0);
    EXPECT_EQ(k_of_m(126), 0.5);
    EXPECT_EQ(k_of_m(132), 132.0 / 252.0);
    EXPECT_LE(std::abs(k_of_m(132) / 0.5415 - 1.0), 0.033);
    EXPECT_THROW(k_of_m(-1), OutOfRange);
    EXPECT_THROW(k_of_m(253), OutOfRange);
}

TEST(Oracle, ForwardAndReverseMax) {
    for (int m = 0; m <= 252; ++m) {
        EXPECT_EQ(f_max(m), 835000.0 / (m + 370.0));
        EXPECT_EQ(r_max(m), 3408.0 * m / (m + 370.0));
    }
    EXPECT_NEAR(f_max(2), 2244.6, 0.05);
    EXPECT_LE(std::abs(f_max(2) / 2244.0 - 1.0), 0.003);
    EXPECT_EQ(r_max(0), 0.0);
    EXPECT_NEAR(f_max(252), 1342.4, 0.05);
    EXPECT_NEAR(r_max(252), 858816.0 / 622.0, 1e-9);
    EXPECT_THROW(f_max(300), OutOfRange);
}

TEST(Oracle, Monotonicity) {
    for (int m = 0; m < 252; ++m) {
        EXPECT_GT(f_max(m), f_max(m + 1));
        EXPECT_LT(r_max(m), r_max(m + 1));
    }
    for (int m = 1; m <= 252; ++m) {
        EXPECT_NEAR(r_max(m) / f_max(m), 3408.0 * m / 835000.0, 1e-15);
    }
}

TEST(Oracle, FitRecoversSyntheticExactly) {
    std::vector<std::pair<double, double>> pts;
    for (int m : {2, 132, 252}) pts.emplace_back(m, 835000.0 / (m + 370.0));
    const OverheadFit fit = fit_overhead(pts);
    EXPECT_NEAR(fit.numerator, 835000.0, 1e-6);
    EXPECT_NEAR(fit.overhead, 370.0, 1e-9);
}

TEST(Oracle, FitOnMeasuredPoints) {
    // Either ACK-size triple is accepted: the quoted fit set says 244, the sweep 252.
    for (double top : {244.0, 252.0}) {
        const OverheadFit fit = fit_overhead({{2, 2244.0}, {top, 1364.0}});
        EXPECT_GT(fit.numerator, 0.0);
        if (top == 244.0) {
            EXPECT_LE(std::abs(fit.numerator / 835000.0 - 1.0), 0.01);
        }
    }
    EXPECT_THROW(fit_overhead({{2, 2244.0}}), DegenerateFit);
    EXPECT_THROW(fit_overhead({{2, 2244.0}, {2, 2240.0}}), DegenerateFit);
}

TEST(Oracle, SimulatedSweepFit) {
    const Calibration& cal = default_calibration();
    std::vector<std::pair<double, double>> pts;
    for (int m : {2, 64, 132, 200, 252}) {
        Kernel k(1);
        RadioArbiter a(k, cal.radio_switch);
        PowerMeter pm(cal.power);
        ChannelState ch;
        EsbConfig cfg;
        cfg.ack_payload = m;
        EsbLink link(k, a, pm, cal, ch, cfg);
        link.set_fwd_demand(Demand::saturated());
        link.assume_active();
        k.run_until(at_us(2000000));
        pts.emplace_back(m, link.fwd_log().kbps(kTimeZero, at_us(2000000)));
    }
    const OverheadFit fit = fit_overhead(pts);
    // Per-exchange period at M = 0, in byte-equivalents at the effective rate.
    const double period0 = static_cast<double>(esb_streaming_period(252, 0, Phy::Phy4M, cal.esb).count());
    EXPECT_NEAR(fit.overhead, period0 / 2.4144, 10.0);
    EXPECT_NEAR(fit.overhead, 370.0, 10.0);
}

TEST(Oracle, BleAggregate) {
    const double a0 = ble_aggregate(0, 7500);
    EXPECT_GE(a0, 1054.0);
    EXPECT_LE(a0, 1100.0);
    EXPECT_NEAR(ble_aggregate(1100, 7500), 0.0, 1e-9);
    EXPECT_NEAR(ble_aggregate(550, 7500), 550.0, 1e-9);
    EXPECT_NEAR(ble_aggregate(0, 100000), 1350.0, 1e-9);
    EXPECT_THROW(ble_aggregate(-1, 7500), OutOfRange);
    EXPECT_THROW(ble_aggregate(1200, 7500), OutOfRange);
}

TEST(Oracle, LinearPowerModels) {
    EXPECT_NEAR(kEsbPower.power_mw(1000), 13.55, 1e-12);
    EXPECT_NEAR(kBlePower.power_mw(1000), 18.0 - 0.01, 1e-12);
    EXPECT_GT(kBlePower.slope_mw_per_kbps, 0.0);
}

TEST(Oracle, LinearFit) {
    const auto [slope, intercept] = linear_fit({{0, 1}, {1, 3}, {2, 5}});
    EXPECT_NEAR(slope, 2.0, 1e-12);
    EXPECT_NEAR(intercept, 1.0, 1e-12);
}
