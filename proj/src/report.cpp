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
#include <coexsim/report.hpp>

#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>

namespace coexsim {

using nlohmann::json;

Check make_check(std::string name, double measured, double target, double tolerance, bool relative) {
    Check c{std::move(name), measured, target, tolerance, relative, false};
    const double delta = std::abs(measured - target);
    c.pass = relative ? delta <= tolerance * std::abs(target) + 1e-12 : delta <= tolerance + 1e-12;
    return c;
}

Check range_check(std::string name, double measured, double lo, double hi) {
    Check c{std::move(name), measured, (lo + hi) / 2.0, (hi - lo) / 2.0, false, false};
    c.pass = measured >= lo && measured <= hi;
    return c;
}

Check flag_check(std::string name, bool ok) {
    return Check{std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, false, ok};
}

Stats stats_of(const std::vector<double>& values) {
    Stats s;
    s.n = values.size();
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
    return s;
}

json to_json(const Stats& s) { return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}}; }

bool Report::all_pass() const {
    for (const Check& c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return true;
}

json Report::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["data"] = data;
    j["checks"] = json::array();
    for (const Check& c : checks) {
        const double delta = c.measured - c.target;
        j["checks"].push_back({{"name", c.name},
                               {"measured", c.measured},
                               {"target", c.target},
                               {"delta", delta},
                               {"delta_rel", c.target != 0.0 ? delta / c.target : 0.0},
                               {"tolerance", c.tolerance},
                               {"tolerance_kind", c.relative ? "relative" : "absolute"},
                               {"pass", c.pass}});
    }
    j["pass"] = all_pass();
    return j;
}

void Report::print_table(std::ostream& out) const {
    out << fmt::format("{}\n", experiment);
    out << fmt::format("  {:<44} {:>12} {:>12} {:>10} {:>8}  {}\n", "quantity", "measured", "target", "delta",
                       "tol", "");
    for (const Check& c : checks) {
        const std::string tol = c.relative ? fmt::format("{:.1f}%", c.tolerance * 100.0) : fmt::format("{:.3g}", c.tolerance);
        out << fmt::format("  {:<44} {:>12.4g} {:>12.4g} {:>+10.3g} {:>8}  {}\n", c.name, c.measured, c.target,
                           c.measured - c.target, tol, c.pass ? "ok" : "FAIL");
    }
}

namespace {

Protocol proto_arg(const json& args, const std::string& path) {
    if (!args.contains("proto") || !args["proto"].is_string()) {
        throw SchemaViolation(path + ".proto", "must be ble or esb");
    }
    const auto p = parse_protocol(args["proto"].get<std::string>());
    if (!p) {
        throw SchemaViolation(path + ".proto", "must be ble or esb");
    }
    return *p;
}

Demand demand_arg(const json& v, const std::string& path) {
    if (v.is_string() && v.get<std::string>() == "saturate") {
        return Demand::saturated();
    }
    if (v.is_number() && v.get<double>() >= 0.0) {
        return Demand::rate(v.get<double>());
    }
    throw SchemaViolation(path, "must be a non-negative kbps number or \"saturate\"");
}

AllocationDemand allocation_arg(const json& args, const std::string& path, const AllocationDemand& base) {
    AllocationDemand d = base;
    if (args.contains("ble")) d.ble = demand_arg(args["ble"], path + ".ble");
    if (args.contains("esb")) d.esb = demand_arg(args["esb"], path + ".esb");
    return d;
}

HandoverDirection direction_arg(const std::string& s, const std::string& path) {
    if (s == "to-ble") return HandoverDirection::ToBle;
    if (s == "to-esb") return HandoverDirection::ToEsb;
    if (s == "ble-adjust") return HandoverDirection::BleAdjust;
    if (s == "esb-adjust") return HandoverDirection::EsbAdjust;
    throw SchemaViolation(path, "must be to-ble, to-esb, ble-adjust or esb-adjust");
}

HandoverScenario scenario_arg(const std::string& s, const std::string& path) {
    if (s == "concurrent") return HandoverScenario::Concurrent;
    if (s == "standby") return HandoverScenario::Standby;
    if (s == "shutdown") return HandoverScenario::Shutdown;
    throw SchemaViolation(path, "must be concurrent, standby or shutdown");
}

}  // namespace

void schedule_commands(CoexSystem& sys, const std::vector<Command>& commands) {
    auto shared = std::make_shared<AllocationDemand>();
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const Command& c = commands[i];
        const std::string path = fmt::format("commands[{}].args", i);
        std::function<void()> action;
        if (c.command == "set_txp") {
            const Protocol p = proto_arg(c.args, path);
            if (!c.args.contains("dbm") || !c.args["dbm"].is_number()) {
                throw SchemaViolation(path + ".dbm", "must be a number");
            }
            const double dbm = c.args["dbm"].get<double>();
            action = [&sys, p, dbm] { sys.set_txp(p, dbm); };
        } else if (c.command == "set_phy") {
            const Protocol p = proto_arg(c.args, path);
            const auto phy = c.args.contains("phy") && c.args["phy"].is_string()
                                 ? parse_phy(c.args["phy"].get<std::string>())
                                 : std::nullopt;
            if (!phy) {
                throw SchemaViolation(path + ".phy", "must be a PHY name");
            }
            require_supported(p, *phy);
            action = [&sys, p, ph = *phy] { sys.set_phy(p, ph); };
        } else if (c.command == "demand") {
            action = [&sys, shared, args = c.args, path] {
                *shared = allocation_arg(args, path, *shared);
                sys.set_demand(*shared);
            };
        } else {
            const std::string dir = c.args.value("direction", "");
            const std::string sc = c.args.value("scenario", "");
            const HandoverDirection d = direction_arg(dir, path + ".direction");
            const HandoverScenario s = scenario_arg(sc, path + ".scenario");
            action = [&sys, shared, d, s, args = c.args, path] {
                *shared = allocation_arg(args, path, *shared);
                sys.handover(d, s, *shared);
            };
        }
        sys.kernel().schedule(at_us(c.at_us), std::move(action));
    }
}

void write_slots_csv(std::ostream& out, const std::vector<RadioSlot>& slots) {
    out << "owner,start_us,end_us,outcome\n";
    for (const RadioSlot& s : slots) {
        out << fmt::format("{},{},{},{}\n", to_string(s.owner), us_of(s.start), us_of(s.end), to_string(s.outcome));
    }
}

void write_transactions_csv(std::ostream& out, const std::vector<Transaction>& txs) {
    out << "seq,first_attempt_us,done_us,fwd_bytes,ack_bytes,retries,airtime_us,outcome\n";
    for (const Transaction& t : txs) {
        const std::int64_t first = t.attempt_starts.empty() ? -1 : us_of(t.attempt_starts.front());
        const std::int64_t done = t.attempt_ends.empty() ? -1 : us_of(t.attempt_ends.back());
        out << fmt::format("{},{},{},{},{},{},{},{}\n", t.seq, first, done, t.fwd_bytes, t.ack_bytes, t.retries_used,
                           t.airtime.count(), to_string(t.outcome));
    }
}

void write_handovers_csv(std::ostream& out, const std::vector<HandoverRecord>& records) {
    out << "command_us,effective_us,direction,latency_us\n";
    for (const HandoverRecord& r : records) {
        out << fmt::format("{},{},{},{}\n", us_of(r.command_time), us_of(r.effective_time), to_string(r.direction),
                           r.latency.count());
    }
}

void write_states_csv(std::ostream& out, const std::vector<StateChange>& changes) {
    out << "time_us,old,new\n";
    for (const StateChange& c : changes) {
        out << fmt::format("{},{},{}\n", us_of(c.at), to_string(c.from), to_string(c.to));
    }
}

void write_artifacts(const Artifacts& a, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(fs::path(dir) / name);
        if (!f) {
            throw std::runtime_error(fmt::format("cannot write {}/{}", dir, name));
        }
        return f;
    };
    if (a.trace) {
        auto f = open("power.csv");
        a.trace->write_csv(f);
    }
    if (!a.slots.empty()) {
        auto f = open("slots.csv");
        write_slots_csv(f, a.slots);
    }
    if (!a.transactions.empty()) {
        auto f = open("transactions.csv");
        write_transactions_csv(f, a.transactions);
    }
    if (!a.handovers.empty()) {
        auto f = open("handovers.csv");
        write_handovers_csv(f, a.handovers);
    }
    if (!a.ble_states.empty()) {
        auto f = open("ble_states.csv");
        write_states_csv(f, a.ble_states);
    }
    for (const auto& [name, contents] : a.files) {
        auto f = open(name.c_str());
        f << contents;
    }
}

}  // namespace coexsim
