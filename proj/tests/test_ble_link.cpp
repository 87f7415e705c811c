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

#include <gtest/gtest.h>

using namespace coexsim;

namespace {

struct World {
    explicit World(BleConfig cfg = {}, std::uint64_t seed = 1)
        : kernel(seed), arbiter(kernel, cal.radio_switch), power(cal.power), link(kernel, arbiter, power, cal, channel, cfg) {}

    const Calibration& cal = default_calibration();
    Kernel kernel;
    RadioArbiter arbiter;
    PowerMeter power;
    ChannelState channel;
    BleLink link;
};

BleConfig with_ci(std::int64_t ci_us) {
    BleConfig c;
    c.connection_interval = Micros{ci_us};
    return c;
}

BleState state_at(const BleLink& link, SimTime t) {
    BleState s = BleState::Sleep;
    for (const StateChange& c : link.state_log()) {
        if (c.at <= t) s = c.to;
    }
    return s;
}

}  // namespace

TEST(BleTiming, EventDuration) {
    const BleTiming& t = default_calibration().ble;
    EXPECT_EQ(ble_event_duration(244, Phy::Phy2M, t).count(), 1420);
    EXPECT_EQ(ble_event_duration(0, Phy::Phy2M, t).count(), 1420 - 244 * 8 / 2);
    EXPECT_EQ(ble_event_duration(244, Phy::Phy1M, t).count(), 444 + 1952);
    EXPECT_THROW(ble_event_duration(245, Phy::Phy2M, t), PayloadTooLarge);
    EXPECT_THROW(ble_event_duration(10, Phy::Phy4M, t), UnsupportedPhy);
}

TEST(BleConfig, Validate) {
    BleConfig c;
    c.payload = 300;
    EXPECT_THROW(c.validate(), PayloadTooLarge);
    c = BleConfig{};
    c.connection_interval = Micros{1000};
    EXPECT_THROW(c.validate(), InvalidInterval);
}

TEST(BleState, TransitionsFollowProcedureOrder) {
    EXPECT_TRUE(is_legal_transition(BleState::Sleep, BleState::Init));
    EXPECT_TRUE(is_legal_transition(BleState::ServiceDiscovery, BleState::Connected));
    EXPECT_FALSE(is_legal_transition(BleState::Sleep, BleState::Connected));
    EXPECT_FALSE(is_legal_transition(BleState::Advertising, BleState::ServiceDiscovery));
    World w;
    EXPECT_THROW(w.link.transition(BleState::Connected), IllegalTransition);
}

TEST(BleWarmup, ZeroPhaseIsDeterministicFloor) {
    World w;
    const WarmupParams& p = w.cal.warmup;
    const WarmupTimeline tl = w.link.warmup(Micros{0});
    const Micros ci = w.link.config().connection_interval;
    const Micros floor = p.ble_init + p.scan_response + p.connect_fixed + p.connect_intervals * ci + p.discovery_fixed +
                         p.discovery_intervals * ci;
    EXPECT_EQ(tl.discovery_done - tl.wake, floor);
    w.kernel.run_until(tl.discovery_done);
    EXPECT_EQ(w.link.state(), BleState::Connected);
}

TEST(BleWarmup, MeanOverSeedsAt20msAdvertising) {
    // Adv wait is uniform on [0, AI): the mean adds AI/2 to the floor.
    double sum = 0.0;
    const int runs = 1000;
    BleConfig cfg = with_ci(7500);
    cfg.advertising_interval = Micros{20000};
    Micros floor{};
    for (int i = 0; i < runs; ++i) {
        World w(cfg, 100 + i);
        const WarmupTimeline tl = w.link.warmup();
        sum += ms_of(tl.discovery_done - tl.wake);
        floor = plan_ble_warmup(cfg, w.cal.warmup, tl.wake, Micros{0}).discovery_done - tl.wake;
    }
    EXPECT_NEAR(sum / runs, ms_of(floor) + 10.0, 0.5);
}

TEST(BleEvent, EmptyQueuesGiveNoExchanges) {
    World w;
    w.link.assume_connected(at_us(0));
    w.kernel.run_until(at_us(500000));
    for (const ConnectionEventRecord& e : w.link.events()) {
        EXPECT_EQ(e.exchanges, 0);
    }
    EXPECT_EQ(w.link.fwd_log().delivered_count(), 0u);
}

TEST(BleEvent, ForwardSaturationAtCi7500) {
    World w(with_ci(7500));
    w.link.set_fwd_demand(Demand::saturated());
    w.link.assume_connected(at_us(0));
    w.kernel.run_until(at_us(5000000));
    const double kbps = w.link.fwd_log().kbps(at_us(1000000), at_us(5000000));
    EXPECT_GE(kbps, 1016.0 * 0.95);
    EXPECT_LE(kbps, 1100.0 * 1.05);
}

TEST(BleEvent, AirtimeStaysInsideAnchor) {
    World w(with_ci(7500));
    w.link.set_fwd_demand(Demand::saturated());
    w.link.set_rev_demand(Demand::saturated());
    w.link.assume_connected(at_us(0));
    w.kernel.run_until(at_us(1000000));
    const auto slots = w.arbiter.slots();
    for (const ConnectionEventRecord& e : w.link.events()) {
        bool inside = false;
        for (const RadioSlot& s : slots) {
            inside = inside || (s.owner == Protocol::Ble && s.start == e.anchor && e.anchor + e.duration <= s.end);
        }
        EXPECT_TRUE(inside);
        EXPECT_LE(e.duration, Micros{7500});
    }
}

TEST(BleEvent, ReverseRateAtCi100WithForwardPinnedHigh) {
    World w(with_ci(100000));
    w.link.set_fwd_demand(Demand::rate(1250));
    w.link.set_rev_demand(Demand::saturated());
    w.link.assume_connected(at_us(0));
    w.kernel.run_until(at_us(10000000));
    EXPECT_LE(w.link.rev_log().kbps(at_us(1000000), at_us(10000000)), 150.0);
}

TEST(BleReliability, LossyChannelDeliversEveryPacketOnce) {
    World w(with_ci(7500), 77);
    w.channel.ble_attenuation_db = 8.0 + 88.0;  // deep in the lossy region
    const int n = 200;
    for (int i = 0; i < n; ++i) w.link.offer_fwd(244);
    w.link.assume_connected(at_us(0));
    w.kernel.run_until(at_us(30000000));
    const DeliveryLog& log = w.link.fwd_log();
    EXPECT_EQ(log.delivered_count(), static_cast<std::size_t>(n));
    EXPECT_EQ(log.received_keys(), log.sent_keys());
}

TEST(BleState, DataOnlyWhileConnected) {
    World w(with_ci(7500), 9);
    w.link.set_fwd_demand(Demand::rate(300));
    w.link.assume_connected(at_us(0));
    for (int step = 0; step < 40; ++step) {
        w.kernel.run_until(w.kernel.now() + Micros{50000} + w.kernel.rng().uniform_below(Micros{100000}));
        if (w.link.state() == BleState::Connected) {
            w.link.enter_standby();
        } else {
            w.link.resume();
        }
    }
    for (const ConnectionEventRecord& e : w.link.events()) {
        if (e.exchanges > 0) {
            EXPECT_EQ(state_at(w.link, e.anchor), BleState::Connected) << us_of(e.anchor);
        }
    }
}
