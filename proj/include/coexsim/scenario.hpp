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
#include <coexsim/coex_controller.hpp>
#include <coexsim/esb_link.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coexsim {

struct Command {
    std::int64_t at_us = 0;
    std::string command;  // set_txp | set_phy | handover | demand
    nlohmann::json args = nlohmann::json::object();
};

struct Outputs {
    bool trace = false;
    bool slots = false;
    bool report = true;
};

/// Per-experiment knobs. Unset fields fall back to each experiment's default.
struct ExperimentParams {
    std::optional<std::string> proto;
    std::optional<int> runs;
    std::optional<std::int64_t> period_us;
    std::optional<std::string> direction;
    std::optional<std::string> scenario;
    std::optional<int> transactions;
    std::optional<std::vector<int>> ack_payloads;
    std::optional<std::vector<std::int64_t>> intervals_us;
};

struct Scenario {
    std::string name = "default";
    std::uint64_t seed = 1;
    std::int64_t horizon_us = 10000000;
    BleConfig ble;
    EsbConfig esb;
    ChannelState channel;
    std::vector<double> rssi_sweep;
    CoexMode mode = CoexMode::Concurrent;
    Disposition inactive = Disposition::Standby;
    std::vector<Command> commands;
    Outputs outputs;
    ExperimentParams params;
};

/// "7.5ms", "600us", "10s" or a bare number of microseconds.
std::int64_t parse_duration_us(const nlohmann::json& value, const std::string& field);

/// Throws ParseError{line, field} on malformed JSON and
/// SchemaViolation{field, constraint} on anything the schema rejects.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// JSON schema of the scenario document, for docs and tooling.
const nlohmann::json& scenario_schema();

nlohmann::json to_json(const Scenario& scenario);

}  // namespace coexsim
