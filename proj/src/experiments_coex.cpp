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

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace coexsim {

using nlohmann::json;

namespace {

SystemConfig system_config(const Scenario& sc, std::uint64_t seed) {
    SystemConfig cfg;
    cfg.seed = seed;
    cfg.ble = sc.ble;
    cfg.esb = sc.esb;
    cfg.channel = sc.channel;
    return cfg;
}

}  // namespace

// ---- coexist ---------------------------------------------------------------

RunOutput run_coexist(const Scenario& sc) {
    RunOutput out;
    out.report.experiment = "coexist";
    const std::vector<std::int64_t> cis =
        sc.params.intervals_us.value_or(std::vector<std::int64_t>{7500, 100000, 1000000});
    json rows = json::array();
    for (std::int64_t ci : cis) {
        const CoexOperatingRange r = configure_coexistence(Micros{ci}, sc.seed);
        rows.push_back({{"ci_us", ci}, {"ble_max_kbps", r.ble_max_kbps}, {"esb_max_kbps", r.esb_max_at_ble_zero_kbps}});
        const std::string tag = fmt::format("ci_{}ms", ci / 1000.0);
        if (ci == 7500) {
            out.report.checks.push_back(make_check(tag + ".ble_max_kbps", r.ble_max_kbps, 1000.0, 0.10));
            out.report.checks.push_back(make_check(tag + ".esb_max_kbps", r.esb_max_at_ble_zero_kbps, 1000.0, 0.10));
        } else if (ci == 100000) {
            out.report.checks.push_back(make_check(tag + ".esb_max_kbps", r.esb_max_at_ble_zero_kbps, 2200.0, 0.10));
        } else if (ci == 1000000) {
            out.report.checks.push_back(make_check(tag + ".esb_max_kbps", r.esb_max_at_ble_zero_kbps, 2300.0, 0.10));
        }
    }
    out.report.data["frontier"] = rows;

    // Fixed total throughput, shifting share from BLE to ESB.
    const double total = 1000.0;
    const SimTime t0 = at_us(1000000);
    const SimTime t1 = at_us(4000000);
    json shares = json::array();
    double previous = 0.0;
    bool decreasing = true;
    for (int i = 0; i <= 4; ++i) {
        const double share = i / 4.0;
        SystemConfig cfg = system_config(sc, sc.seed);
        cfg.ble.connection_interval = Micros{100000};
        CoexSystem sys(cfg);
        sys.start(CoexMode::Concurrent);
        sys.set_demand({Demand::rate(total * (1.0 - share)), Demand::rate(total * share)});
        sys.kernel().run_until(t1);
        const double p = sys.power().trace(t0, t1).mean_power_mw(t0, t1);
        const double delivered = sys.ble().fwd_log().kbps(t0, t1) + sys.esb().fwd_log().kbps(t0, t1);
        shares.push_back({{"esb_share", share}, {"power_mw", p}, {"delivered_kbps", delivered}});
        if (i > 0 && !(p < previous)) {
            decreasing = false;
        }
        previous = p;
        if (i == 2) {
            out.artifacts.trace = sys.power().trace(t0, t0 + Micros{300000});
            out.artifacts.slots = sys.arbiter().slots();
        }
    }
    out.report.data["power_vs_esb_share"] = shares;
    out.report.checks.push_back(flag_check("power_decreases_with_esb_share", decreasing));
    return out;
}

// ---- handover --------------------------------------------------------------

namespace {

struct HandoverCase {
    HandoverScenario scenario;
    HandoverDirection direction;
    CoexMode mode;
    Disposition disposition;
    double mean_ms;
    double sd_ms;
};

std::vector<HandoverCase> handover_cases(const ReferenceTargets& t) {
    using D = HandoverDirection;
    using S = HandoverScenario;
    return {
        {S::Concurrent, D::BleAdjust, CoexMode::Concurrent, Disposition::Standby, t.concurrent_ble_adjust_ms,
         t.concurrent_ble_adjust_sd},
        {S::Concurrent, D::EsbAdjust, CoexMode::Concurrent, Disposition::Standby, t.concurrent_esb_adjust_ms,
         t.concurrent_esb_adjust_sd},
        {S::Standby, D::ToEsb, CoexMode::BleOnly, Disposition::Standby, t.standby_to_esb_ms, t.standby_to_esb_sd},
        {S::Standby, D::ToBle, CoexMode::EsbOnly, Disposition::Standby, t.standby_to_ble_ms, t.standby_to_ble_sd},
        {S::Shutdown, D::ToEsb, CoexMode::BleOnly, Disposition::Shutdown, t.shutdown_to_esb_ms, t.shutdown_to_esb_sd},
        {S::Shutdown, D::ToBle, CoexMode::EsbOnly, Disposition::Shutdown, t.shutdown_to_ble_ms, t.shutdown_to_ble_sd},
    };
}

}  // namespace

RunOutput run_handover(const Scenario& sc) {
    const ReferenceTargets t;
    RunOutput out;
    out.report.experiment = "handover";
    const int runs = sc.params.runs.value_or(500);
    if (runs < 2) {
        throw SchemaViolation("params.runs", "must be >= 2");
    }
    int matched = 0;
    for (const HandoverCase& c : handover_cases(t)) {
        if (sc.params.scenario && *sc.params.scenario != to_string(c.scenario)) continue;
        if (sc.params.direction && *sc.params.direction != to_string(c.direction)) continue;
        ++matched;
        std::vector<double> latencies;
        for (int i = 0; i < runs; ++i) {
            CoexSystem sys(system_config(sc, sc.seed + static_cast<std::uint64_t>(i)));
            sys.start(c.mode, c.disposition);
            const Micros phase = sys.kernel().rng().uniform_below(Micros{1000000});
            sys.kernel().run_until(at_us(1000000) + phase);
            sys.handover(c.direction, c.scenario, {Demand::rate(100), Demand::rate(100)});
            sys.kernel().run_until(sys.kernel().now() + Micros{2000000});
            const HandoverRecord& rec = sys.handovers().at(0);
            latencies.push_back(ms_of(rec.latency));
            out.artifacts.handovers.push_back(rec);
        }
        const Stats s = stats_of(latencies);
        const std::string tag = fmt::format("{}.{}", to_string(c.scenario), to_string(c.direction));
        out.report.data[tag] = {{"latency_ms", to_json(s)}, {"target_mean_ms", c.mean_ms}, {"target_sd_ms", c.sd_ms}};
        out.report.checks.push_back(make_check(tag + ".mean_ms", s.mean, c.mean_ms, 0.10));
        if (c.scenario == HandoverScenario::Standby && c.direction == HandoverDirection::ToBle) {
            // Uniform wait for the next anchor over one connection interval.
            const double ci_ms = ms_of(sc.ble.connection_interval);
            out.report.checks.push_back(make_check(tag + ".closed_form_mean_ms", s.mean, ci_ms / 2.0, 0.10));
            out.report.checks.push_back(make_check(tag + ".closed_form_sd_ms", s.sd, ci_ms / std::sqrt(12.0), 0.10));
        }
    }
    if (matched == 0) {
        throw SchemaViolation("params", "no handover case matches the given scenario/direction");
    }
    return out;
}

// ---- wakeup-hybrid ---------------------------------------------------------

RunOutput run_wakeup_hybrid(const Scenario& sc) {
    const ReferenceTargets t;
    RunOutput out;
    out.report.experiment = "wakeup-hybrid";
    const int runs = sc.params.runs.value_or(300);
    if (runs < 1) {
        throw SchemaViolation("params.runs", "must be >= 1");
    }
    std::vector<double> first;
    std::vector<double> connected;
    std::vector<double> stop;
    int gap_free = 0;
    for (int i = 0; i < runs; ++i) {
        SystemConfig cfg = system_config(sc, sc.seed + static_cast<std::uint64_t>(i));
        cfg.ble.advertising_interval = Micros{static_cast<std::int64_t>(t.hybrid_adv_interval_ms * 1000.0)};
        cfg.ble.connection_interval = Micros{static_cast<std::int64_t>(t.coexistence_ci_ms * 1000.0)};
        CoexSystem sys(cfg);
        const HybridWakeupTimeline tl = sys.hybrid_wakeup(Demand::saturated());
        first.push_back(ms_of(tl.t_esb_first_pkt - tl.wake));
        connected.push_back(ms_of(tl.t_ble_connected - tl.wake));
        stop.push_back(ms_of(tl.t_esb_stop - tl.wake));
        gap_free += tl.gap_free ? 1 : 0;
        if (i == 0) {
            out.artifacts.trace = sys.power().trace(tl.wake, tl.t_esb_stop + Micros{50000});
            out.artifacts.ble_states = sys.ble().state_log();
            out.artifacts.slots = sys.arbiter().slots();
        }
    }
    const Stats a = stats_of(first);
    const Stats b = stats_of(connected);
    const Stats c = stats_of(stop);
    out.report.data = {{"t_esb_first_pkt_ms", to_json(a)},
                       {"t_ble_connected_ms", to_json(b)},
                       {"t_esb_stop_ms", to_json(c)},
                       {"gap_free_runs", gap_free},
                       {"runs", runs}};
    out.report.checks.push_back(make_check("t_esb_first_pkt_ms", a.mean, t.hybrid_esb_first_ms, 0.10));
    out.report.checks.push_back(make_check("t_ble_connected_ms", b.mean, t.hybrid_ble_connected_ms, 0.10));
    out.report.checks.push_back(make_check("t_esb_stop_ms", c.mean, t.hybrid_esb_stop_ms, 0.10));
    out.report.checks.push_back(flag_check("gap_free_every_run", gap_free == runs));
    return out;
}

// ---- txp-phy ---------------------------------------------------------------

namespace {

Command cmd(std::int64_t at, std::string name, json args) { return Command{at, std::move(name), std::move(args)}; }

/// Throughput per 1 s bin for both protocols over [0, horizon).
json throughput_bins(CoexSystem& sys, std::int64_t horizon_us) {
    json bins = json::array();
    for (std::int64_t s = 0; s + 1000000 <= horizon_us; s += 1000000) {
        bins.push_back({{"t_s", s / 1000000},
                        {"ble_kbps", sys.ble().fwd_log().kbps(at_us(s), at_us(s + 1000000))},
                        {"esb_kbps", sys.esb().fwd_log().kbps(at_us(s), at_us(s + 1000000))}});
    }
    return bins;
}

}  // namespace

RunOutput run_txp_phy(const Scenario& sc) {
    RunOutput out;
    out.report.experiment = "txp-phy";

    // TXP: each protocol steps +8 -> -2 -> -12 dBm while the other holds.
    {
        CoexSystem sys(system_config(sc, sc.seed));
        sys.start(CoexMode::Concurrent);
        sys.set_demand({Demand::rate(200), Demand::rate(500)});
        schedule_commands(sys, {cmd(1000000, "set_txp", {{"proto", "ble"}, {"dbm", -2}}),
                                cmd(2000000, "set_txp", {{"proto", "ble"}, {"dbm", -12}}),
                                cmd(3000000, "set_txp", {{"proto", "esb"}, {"dbm", -2}}),
                                cmd(4000000, "set_txp", {{"proto", "esb"}, {"dbm", -12}})});
        json samples = json::array();
        std::vector<std::pair<double, double>> rssi;
        for (std::int64_t at = 500000; at < 5000000; at += 1000000) {
            sys.kernel().run_until(at_us(at));
            const double b = sys.channel().rssi(Protocol::Ble);
            const double e = sys.channel().rssi(Protocol::Esb);
            rssi.emplace_back(b, e);
            samples.push_back({{"t_us", at}, {"ble_rssi_dbm", b}, {"esb_rssi_dbm", e}});
        }
        out.report.data["txp"] = samples;
        const bool ble_steps = rssi[0].first - rssi[1].first == 10.0 && rssi[1].first - rssi[2].first == 10.0;
        const bool esb_held = rssi[0].second == rssi[1].second && rssi[1].second == rssi[2].second;
        const bool esb_steps = rssi[2].second - rssi[3].second == 10.0 && rssi[3].second - rssi[4].second == 10.0;
        const bool ble_held = rssi[2].first == rssi[3].first && rssi[3].first == rssi[4].first;
        out.report.checks.push_back(flag_check("txp.ble_rssi_steps_10db", ble_steps));
        out.report.checks.push_back(flag_check("txp.esb_rssi_unchanged_by_ble", esb_held));
        out.report.checks.push_back(flag_check("txp.esb_rssi_steps_10db", esb_steps));
        out.report.checks.push_back(flag_check("txp.ble_rssi_unchanged_by_esb", ble_held));
    }

    // PHY sequence, or the scenario's own command script when it has one.
    const bool scripted = !sc.commands.empty();
    const std::int64_t phase = sc.params.period_us.value_or(5000000);
    const std::int64_t horizon = scripted ? sc.horizon_us : 5 * phase;
    SystemConfig cfg = system_config(sc, sc.seed);
    if (!scripted) {
        cfg.ble.phy = Phy::CodedS8;
        cfg.esb.phy = Phy::Phy1M;
    }
    CoexSystem sys(cfg);
    sys.start(sc.mode, sc.inactive);
    if (scripted) {
        schedule_commands(sys, sc.commands);
    } else {
        schedule_commands(sys, {cmd(0, "demand", {{"ble", 200}, {"esb", "saturate"}}),
                                cmd(phase, "set_phy", {{"proto", "ble"}, {"phy", "1m"}}),
                                cmd(2 * phase, "set_phy", {{"proto", "ble"}, {"phy", "2m"}}),
                                cmd(3 * phase, "set_phy", {{"proto", "esb"}, {"phy", "2m"}}),
                                cmd(4 * phase, "set_phy", {{"proto", "esb"}, {"phy", "4m"}})});
    }
    sys.kernel().run_until(at_us(horizon));
    out.report.data["bins"] = throughput_bins(sys, horizon);
    out.artifacts.handovers = sys.handovers();
    out.artifacts.slots = sys.arbiter().slots();
    if (scripted) {
        return out;
    }

    const std::int64_t settle = std::min<std::int64_t>(2000000, phase / 2);
    json phases = json::array();
    std::vector<std::pair<double, double>> rates;
    const char* names[] = {"ble_coded_esb_1m", "ble_1m_esb_1m", "ble_2m_esb_1m", "ble_2m_esb_2m", "ble_2m_esb_4m"};
    for (int i = 0; i < 5; ++i) {
        const SimTime t0 = at_us(i * phase + settle);
        const SimTime t1 = at_us((i + 1) * phase);
        const double b = sys.ble().fwd_log().kbps(t0, t1);
        const double e = sys.esb().fwd_log().kbps(t0, t1);
        rates.emplace_back(b, e);
        phases.push_back({{"phase", names[i]}, {"ble_kbps", b}, {"esb_kbps", e}});
    }
    out.report.data["phases"] = phases;
    auto& ck = out.report.checks;
    ck.push_back(make_check("phy.ble_coded.ble_kbps", rates[0].first, 50.0, 0.15));
    // A zero reference gets an absolute band: 15% of the level it rises to.
    ck.push_back(make_check("phy.ble_coded.esb_kbps", rates[0].second, 0.0, 0.15 * rates[1].second, false));
    ck.push_back(make_check("phy.ble_1m.ble_kbps", rates[1].first, 200.0, 0.15));
    ck.push_back(make_check("phy.ble_1m.esb_kbps", rates[1].second, 500.0, 0.15));
    ck.push_back(make_check("phy.esb_2m.esb_kbps", rates[3].second, 1200.0, 0.15));
    ck.push_back(make_check("phy.esb_4m.esb_kbps", rates[4].second, 1800.0, 0.15));
    ck.push_back(make_check("phy.esb_2m.ble_kbps", rates[3].first, 200.0, 0.15));
    ck.push_back(make_check("phy.esb_4m.ble_kbps", rates[4].first, 200.0, 0.15));
    ck.push_back(make_check("phy.ble_isolated_from_esb_phy", rates[4].first, rates[3].first, 0.02));
    return out;
}

// ---- registry --------------------------------------------------------------

std::span<const ExperimentInfo> experiments() {
    static const ExperimentInfo table[] = {
        {"single-packet", "one 244 B packet per protocol: event time and energy", &run_single_packet},
        {"stream", "mean power against streaming throughput", &run_stream},
        {"sleepwake", "cold wake-up plus one packet, over many seeds", &run_sleepwake},
        {"bidir", "bidirectional throughput: BLE CI sweeps, ESB ACK payloads, hybrid frontier", &run_bidir},
        {"coexist", "BLE/ESB frontier per connection interval and power by ESB share", &run_coexist},
        {"handover", "latency of the six handover cases", &run_handover},
        {"wakeup-hybrid", "ESB-bridged BLE wake-up timeline", &run_wakeup_hybrid},
        {"txp-phy", "independent TXP and PHY control", &run_txp_phy},
        {"ack-loss", "ACK back-channel loss against RSSI", &run_ack_loss},
        {"oracle", "closed-form ACK-payload capacity sweep and fit", &run_oracle},
        {"calibrate", "re-derive calibration constants and check closure", &run_calibrate},
    };
    return table;
}

RunOutput run_experiment(std::string_view name, const Scenario& scenario) {
    for (const ExperimentInfo& e : experiments()) {
        if (e.name == name) {
            return e.run(scenario);
        }
    }
    throw std::invalid_argument(fmt::format("unknown experiment '{}'", name));
}

}  // namespace coexsim
