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
#include <coexsim/channel_power.hpp>
#include <coexsim/coex_controller.hpp>
#include <coexsim/esb_link.hpp>
#include <coexsim/radio_arbiter.hpp>
#include <coexsim/scenario.hpp>

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace coexsim {

/// One measured quantity against its reference value. `tolerance` is relative
/// when `relative` is set, absolute otherwise.
struct Check {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool relative = true;
    bool pass = false;
};

Check make_check(std::string name, double measured, double target, double tolerance, bool relative = true);
/// Passes iff lo <= measured <= hi; target reported as the midpoint.
Check range_check(std::string name, double measured, double lo, double hi);
Check flag_check(std::string name, bool ok);

struct Stats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

Stats stats_of(const std::vector<double>& values);
nlohmann::json to_json(const Stats& s);

struct Report {
    std::string experiment;
    nlohmann::json data = nlohmann::json::object();
    std::vector<Check> checks;

    bool all_pass() const;
    nlohmann::json to_json() const;
    void print_table(std::ostream& out) const;
};

/// Traces captured from a representative run.
struct Artifacts {
    std::optional<PowerTrace> trace;
    std::vector<RadioSlot> slots;
    std::vector<Transaction> transactions;
    std::vector<HandoverRecord> handovers;
    std::vector<StateChange> ble_states;
    /// Additional named files (name, contents), e.g. tabulated sweeps.
    std::vector<std::pair<std::string, std::string>> files;
};

struct RunOutput {
    Report report;
    Artifacts artifacts;
};

/// Schedules every command of a scenario script on the system.
void schedule_commands(CoexSystem& sys, const std::vector<Command>& commands);

/// Writes the CSV artifacts that exist into `dir` (created if missing).
void write_artifacts(const Artifacts& artifacts, const std::string& dir);

void write_slots_csv(std::ostream& out, const std::vector<RadioSlot>& slots);
void write_transactions_csv(std::ostream& out, const std::vector<Transaction>& txs);
void write_handovers_csv(std::ostream& out, const std::vector<HandoverRecord>& records);
void write_states_csv(std::ostream& out, const std::vector<StateChange>& changes);

}  // namespace coexsim
