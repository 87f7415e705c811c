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

#include <coexsim/report.hpp>
#include <coexsim/scenario.hpp>

#include <span>
#include <string_view>

namespace coexsim {

using ExperimentFn = RunOutput (*)(const Scenario&);

struct ExperimentInfo {
    std::string_view name;
    std::string_view summary;
    ExperimentFn run;
};

/// Every named reproduction, in CLI order.
std::span<const ExperimentInfo> experiments();

/// Throws std::invalid_argument for an unknown name.
RunOutput run_experiment(std::string_view name, const Scenario& scenario);

// Link-level experiments.
RunOutput run_single_packet(const Scenario& sc);
RunOutput run_stream(const Scenario& sc);
RunOutput run_sleepwake(const Scenario& sc);
RunOutput run_bidir(const Scenario& sc);
RunOutput run_ack_loss(const Scenario& sc);
RunOutput run_oracle(const Scenario& sc);
RunOutput run_calibrate(const Scenario& sc);

// Coexistence and Enhanced-BLE experiments.
RunOutput run_coexist(const Scenario& sc);
RunOutput run_handover(const Scenario& sc);
RunOutput run_wakeup_hybrid(const Scenario& sc);
RunOutput run_txp_phy(const Scenario& sc);

/// Shared by `bidir`: ESB forward + BLE reverse frontier at CI 100 ms.
struct SplitFrontier {
    std::vector<std::pair<double, double>> points;  // (fwd, rev) kbps
    double fwd_max = 0.0;
    double rev_max = 0.0;
    double slope = 0.0;
    std::uint64_t rev_sent = 0;
    std::uint64_t rev_delivered = 0;
};
SplitFrontier measure_split_frontier(std::uint64_t seed, Micros horizon = Micros{5000000});

}  // namespace coexsim
