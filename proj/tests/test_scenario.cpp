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
#include <coexsim/experiments.hpp>
#include <coexsim/scenario.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace coexsim;

TEST(Scenario, MinimalFileGetsDefaults) {
    const Scenario s = parse_scenario(R"({"name": "m", "seed": 5})");
    EXPECT_EQ(s.name, "m");
    EXPECT_EQ(s.seed, 5u);
    EXPECT_EQ(s.ble.connection_interval.count(), 100000);
    EXPECT_EQ(s.esb.retransmit_delay.count(), 600);
    EXPECT_EQ(s.mode, CoexMode::Concurrent);
}

TEST(Scenario, DurationSuffixes) {
    EXPECT_EQ(parse_duration_us("7.5ms", "x"), 7500);
    EXPECT_EQ(parse_duration_us("600us", "x"), 600);
    EXPECT_EQ(parse_duration_us("10s", "x"), 10000000);
    EXPECT_EQ(parse_duration_us(1234, "x"), 1234);
    const Scenario s = parse_scenario(R"({"ble": {"connection_interval": "7.5ms"}})");
    EXPECT_EQ(s.ble.connection_interval.count(), 7500);
}

TEST(Scenario, UnknownFieldNamed) {
    try {
        parse_scenario(R"({"name": "x", "ble": {"conn_interval": 5}})");
        FAIL() << "expected SchemaViolation";
    } catch (const SchemaViolation& e) {
        EXPECT_EQ(e.field(), "ble.conn_interval");
    }
}

TEST(Scenario, ParseErrorCarriesLine) {
    try {
        parse_scenario("{\n\"name\": \"x\",\n\"seed\": }");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Scenario, ConstraintsChecked) {
    EXPECT_THROW(parse_scenario(R"({"ble": {"payload": 245}})"), SchemaViolation);
    EXPECT_THROW(parse_scenario(R"({"esb": {"phy": "coded-s8"}})"), SchemaViolation);
    EXPECT_THROW(parse_scenario(R"({"commands": [{"at_us": 5, "command": "x"}, {"at_us": 1, "command": "demand"}]})"),
                 SchemaViolation);
}

TEST(Scenario, RoundTripThroughJson) {
    const Scenario s = parse_scenario(
        R"({"name": "rt", "seed": 3, "ble": {"connection_interval": "7.5ms", "phy": "1m"}, "esb": {"ack_payload": 32}})");
    const Scenario t = parse_scenario(to_json(s).dump());
    EXPECT_EQ(to_json(s), to_json(t));
}

TEST(Scenario, SchemaIsDraft07) {
    EXPECT_EQ(scenario_schema().at("$schema"), "http://json-schema.org/draft-07/schema#");
    EXPECT_FALSE(scenario_schema().at("additionalProperties").get<bool>());
}

TEST(Experiments, ReplayIsByteIdentical) {
    Scenario sc;
    sc.seed = 17;
    sc.params.runs = 20;
    const RunOutput a = run_experiment("handover", sc);
    const RunOutput b = run_experiment("handover", sc);
    EXPECT_EQ(a.report.to_json().dump(), b.report.to_json().dump());
    std::ostringstream x, y;
    write_handovers_csv(x, a.artifacts.handovers);
    write_handovers_csv(y, b.artifacts.handovers);
    EXPECT_EQ(x.str(), y.str());
    EXPECT_EQ(x.str().substr(0, x.str().find('\n')), "command_us,effective_us,direction,latency_us");
}

TEST(Experiments, UnknownNameRejected) {
    EXPECT_THROW(run_experiment("nope", Scenario{}), std::invalid_argument);
    EXPECT_EQ(experiments().size(), 11u);
}

TEST(Experiments, ReportsCarryTargetAndDelta) {
    const RunOutput out = run_experiment("single-packet", Scenario{});
    const auto j = out.report.to_json();
    ASSERT_FALSE(j["checks"].empty());
    for (const auto& c : j["checks"]) {
        EXPECT_TRUE(c.contains("target"));
        EXPECT_TRUE(c.contains("delta"));
    }
    EXPECT_TRUE(out.report.all_pass());
}

TEST(Experiments, CommandScriptDrivesSystem) {
    Scenario sc = parse_scenario(R"({
        "mode": {"mode": "ble-only", "inactive": "standby"},
        "horizon_us": "3s",
        "commands": [
          {"at_us": 0, "command": "demand", "args": {"ble": 100}},
          {"at_us": "1s", "command": "handover", "args": {"direction": "to-esb", "scenario": "standby", "esb": 500, "ble": 0}}
        ]})");
    const RunOutput out = run_experiment("txp-phy", sc);
    ASSERT_EQ(out.artifacts.handovers.size(), 1u);
    EXPECT_EQ(out.artifacts.handovers[0].direction, HandoverDirection::ToEsb);
    EXPECT_GT(out.report.data["bins"][2]["esb_kbps"].get<double>(), 400.0);
}
