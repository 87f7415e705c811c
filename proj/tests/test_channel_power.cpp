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
#include <coexsim/channel_power.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace coexsim;

TEST(Channel, Rssi) {
    EXPECT_EQ(rssi(8, 41), -33);
    EXPECT_EQ(rssi(-2, 41), -43);
    EXPECT_EQ(rssi(8, 0), 8);
    ChannelState ch;
    EXPECT_EQ(ch.rssi(Protocol::Ble), -33);
    EXPECT_EQ(ch.rssi(Protocol::Esb), -31);
}

TEST(Channel, AckLossAnchors) {
    EXPECT_DOUBLE_EQ(ack_loss_prob(-80), 0.22);
    EXPECT_DOUBLE_EQ(ack_loss_prob(-50), 0.0);
    EXPECT_NEAR(ack_loss_prob(-75), (0.22 + 0.07) / 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(ack_loss_prob(-95), 0.22);
    EXPECT_DOUBLE_EQ(ack_loss_prob(-20), 0.0);
}

TEST(Channel, ThroughputCap) {
    for (Phy p : {Phy::CodedS8, Phy::Phy1M, Phy::Phy2M}) {
        EXPECT_DOUBLE_EQ(throughput_cap(-40, Protocol::Ble, p), 1.0);
        EXPECT_DOUBLE_EQ(throughput_cap(-65, Protocol::Ble, p), 1.0);
        EXPECT_DOUBLE_EQ(throughput_cap(-100, Protocol::Ble, p), 0.0);
    }
    for (Phy p : {Phy::Phy1M, Phy::Phy2M, Phy::Phy4M}) {
        EXPECT_DOUBLE_EQ(throughput_cap(-40, Protocol::Esb, p), 1.0);
        EXPECT_DOUBLE_EQ(throughput_cap(-100, Protocol::Esb, p), 0.0);
    }
    EXPECT_LT(throughput_cap(-85, Protocol::Esb, Phy::Phy4M), throughput_cap(-85, Protocol::Ble, Phy::Phy2M));
}

TEST(Channel, Monotonicity) {
    for (double r = -110; r < -20; r += 0.25) {
        EXPECT_GE(ack_loss_prob(r), ack_loss_prob(r + 0.25));
        for (Phy p : {Phy::CodedS8, Phy::Phy1M, Phy::Phy2M}) {
            EXPECT_LE(throughput_cap(r, Protocol::Ble, p), throughput_cap(r + 0.25, Protocol::Ble, p));
        }
        for (Phy p : {Phy::Phy1M, Phy::Phy2M, Phy::Phy4M}) {
            EXPECT_LE(throughput_cap(r, Protocol::Esb, p), throughput_cap(r + 0.25, Protocol::Esb, p));
        }
    }
}

TEST(Power, InstantaneousIsSleepPlusStates) {
    PowerParams p;
    p.sleep_mw = 0.01;
    p.standby_mw = 0.5;
    p.esb_tx_extra = 20.0;
    const PowerState none[] = {PowerState::Standby};
    EXPECT_DOUBLE_EQ(instantaneous_power(p, none), 0.5);
    const PowerState tx[] = {PowerState::Standby, PowerState::EsbTx};
    EXPECT_DOUBLE_EQ(instantaneous_power(p, tx), 20.5);
    EXPECT_DOUBLE_EQ(instantaneous_power(p, {}), 0.01);
}

TEST(Power, TraceIntegration) {
    PowerMeter m(PowerParams{});
    m.set_awake(at_us(0), true);
    m.add_mw(at_us(100), at_us(300), 10.0);
    const PowerTrace tr = m.trace(at_us(0), at_us(1000));
    // 0.55 mW for 1000 us plus 10 mW for 200 us.
    EXPECT_EQ(tr.integrate_pj(at_us(0), at_us(1000)), 550 * 1000 + 10000 * 200);
    EXPECT_DOUBLE_EQ(tr.power_mw_at(at_us(150)), 10.55);
    EXPECT_THROW(tr.integrate_pj(at_us(0), at_us(2000)), UncoveredInterval);
}

TEST(Power, EnergyAdditivityIsExact) {
    PowerMeter m(default_calibration().power);
    m.set_awake(at_us(0), true);
    for (int i = 0; i < 200; ++i) {
        m.add(at_us(i * 997), at_us(i * 997 + 431), i % 2 ? PowerState::EsbTx : PowerState::BleData);
    }
    const PowerTrace tr = m.trace(at_us(0), at_us(300000));
    for (std::int64_t t1 : {1, 431, 12345, 99999, 250000}) {
        EXPECT_EQ(tr.integrate_pj(at_us(0), at_us(300000)),
                  tr.integrate_pj(at_us(0), at_us(t1)) + tr.integrate_pj(at_us(t1), at_us(300000)));
    }
}

TEST(Power, CsvFormat) {
    PowerMeter m(PowerParams{});
    m.set_awake(at_us(0), true);
    m.add_mw(at_us(10), at_us(20), 1.0);
    std::ostringstream out;
    m.trace(at_us(0), at_us(30)).write_csv(out);
    EXPECT_EQ(out.str(), "time_us,power_mw\n0,0.550\n10,1.550\n20,0.550\n");
}
