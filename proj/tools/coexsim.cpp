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

// coexsim: command-line front end for the named experiments.

#include <coexsim/error.hpp>
#include <coexsim/experiments.hpp>
#include <coexsim/scenario.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>

using namespace coexsim;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kSchema = 2, kSim = 3, kCheck = 4 };

struct Options {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    bool json = false;
    bool check = false;
    std::string out;
    std::string proto;
    std::optional<int> runs;
    std::string period;
    std::string direction;
    std::optional<int> transactions;
};

int fail(int code, const std::string& kind, const std::string& message, json extra = json::object()) {
    json err = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    for (auto& [k, v] : extra.items()) {
        err["error"][k] = v;
    }
    std::cerr << err.dump() << "\n";
    return code;
}

int fail(int code, const CoexError& e) {
    json extra = json::object();
    if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        extra = {{"line", p->line()}, {"field", p->field()}};
    } else if (const auto* s = dynamic_cast<const SchemaViolation*>(&e)) {
        extra = {{"field", s->field()}, {"constraint", s->constraint()}};
    } else if (const auto* i = dynamic_cast<const Infeasible*>(&e)) {
        extra = {{"nearest_fwd_kbps", i->nearest_fwd_kbps()}, {"nearest_rev_kbps", i->nearest_rev_kbps()}};
    }
    return fail(code, e.kind(), e.what(), extra);
}

bool is_handover_scenario(const std::string& s) { return s == "concurrent" || s == "standby" || s == "shutdown"; }

/// Scenario file plus command-line overrides.
Scenario resolve(const std::string& experiment, const Options& o) {
    Scenario sc;
    const bool scenario_is_case = experiment == "handover" && is_handover_scenario(o.scenario);
    if (!o.scenario.empty() && !scenario_is_case) {
        sc = load_scenario(o.scenario);
    }
    if (scenario_is_case) {
        sc.params.scenario = o.scenario;
    }
    if (o.seed) sc.seed = *o.seed;
    if (!o.proto.empty()) {
        if (o.proto != "hybrid" && !parse_protocol(o.proto)) {
            throw SchemaViolation("--proto", "must be ble, esb or hybrid");
        }
        sc.params.proto = o.proto;
    }
    if (o.runs) sc.params.runs = *o.runs;
    if (o.transactions) sc.params.transactions = *o.transactions;
    if (!o.period.empty()) {
        json v;
        try {
            v = json::parse(o.period);
        } catch (const json::exception&) {
            v = o.period;
        }
        sc.params.period_us = parse_duration_us(v, "--period");
    }
    if (!o.direction.empty()) sc.params.direction = o.direction;
    return sc;
}

std::string output_dir(const std::string& experiment, const Scenario& sc, const Options& o) {
    if (!o.out.empty()) {
        return o.out;
    }
    if (const char* env = std::getenv("COEXSIM_OUT"); env && *env) {
        return (std::filesystem::path(env) / fmt::format("{}-seed{}", experiment, sc.seed)).string();
    }
    return {};
}

int run(const std::string& experiment, const Options& o) {
    Scenario sc;
    try {
        sc = resolve(experiment, o);
    } catch (const CoexError& e) {
        return fail(kSchema, e);
    }

    RunOutput result;
    try {
        result = run_experiment(experiment, sc);
    } catch (const SchemaViolation& e) {
        return fail(kSchema, e);
    } catch (const CoexError& e) {
        return fail(kSim, e);
    } catch (const std::exception& e) {
        return fail(kSim, "RuntimeError", e.what());
    }

    json report = result.report.to_json();
    report["seed"] = sc.seed;
    report["scenario"] = sc.name;

    const std::string dir = output_dir(experiment, sc, o);
    if (!dir.empty()) {
        try {
            write_artifacts(result.artifacts, dir);
            std::ofstream f(std::filesystem::path(dir) / "report.json");
            f << report.dump(2) << "\n";
        } catch (const std::exception& e) {
            return fail(kSim, "OutputError", e.what());
        }
    }

    if (o.json) {
        std::cout << report.dump(2) << "\n";
    } else {
        if (experiment == "oracle") {
            for (const auto& [name, contents] : result.artifacts.files) {
                if (name == "oracle.csv") std::cout << contents;
            }
        }
        result.report.print_table(std::cout);
        if (!dir.empty()) {
            std::cout << fmt::format("artifacts: {}\n", dir);
        }
    }
    if (o.check && !result.report.all_pass()) {
        return fail(kCheck, "CheckFailed", fmt::format("{} check(s) outside tolerance",
                                                       std::count_if(result.report.checks.begin(),
                                                                     result.report.checks.end(),
                                                                     [](const Check& c) { return !c.pass; })));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BLE + ESB coexistence simulator"};
    app.require_subcommand(1);
    Options o;
    std::string selected;

    for (const ExperimentInfo& e : experiments()) {
        CLI::App* sub = app.add_subcommand(std::string(e.name), std::string(e.summary));
        sub->add_option("--scenario", o.scenario, "scenario file (handover also accepts concurrent|standby|shutdown)");
        sub->add_option("--seed", o.seed, "base RNG seed");
        sub->add_flag("--json", o.json, "print the report as JSON");
        sub->add_flag("--check", o.check, "exit 4 when a check is outside tolerance");
        sub->add_option("--out", o.out, "artifact directory (default: $COEXSIM_OUT/<experiment>-seed<N>)");
        sub->add_option("--proto", o.proto, "restrict to ble, esb (or hybrid for bidir)");
        sub->add_option("--runs", o.runs, "repetitions for stochastic experiments");
        sub->add_option("--period", o.period, "period or phase length, e.g. 10s");
        sub->add_option("--direction", o.direction, "handover direction");
        sub->add_option("--transactions", o.transactions, "ESB transactions per RSSI point");
        sub->callback([&selected, sub] { selected = sub->get_name(); });
    }
    app.add_subcommand("schema", "print the scenario JSON schema")->callback([&selected] { selected = "schema"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kSchema, "UsageError", e.what());
    }

    if (selected == "schema") {
        std::cout << scenario_schema().dump(2) << "\n";
        return kOk;
    }
    return run(selected, o);
}
