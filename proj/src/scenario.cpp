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
#include <coexsim/scenario.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace coexsim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) {
        throw SchemaViolation(path.empty() ? "$" : path, "must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw SchemaViolation(path.empty() ? key : path + "." + key, "unknown field");
        }
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        throw SchemaViolation(field, "must be a number");
    }
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& field, std::int64_t lo, std::int64_t hi) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw SchemaViolation(field, "must be an integer");
    }
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
        throw SchemaViolation(field, fmt::format("must be in [{}, {}]", lo, hi));
    }
    return x;
}

std::string string(const json& v, const std::string& field) {
    if (!v.is_string()) {
        throw SchemaViolation(field, "must be a string");
    }
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& field) {
    if (!v.is_boolean()) {
        throw SchemaViolation(field, "must be a boolean");
    }
    return v.get<bool>();
}

Phy phy(const json& v, const std::string& field, Protocol proto) {
    const auto p = parse_phy(string(v, field));
    if (!p || !supports(proto, *p)) {
        throw SchemaViolation(field, proto == Protocol::Ble ? "must be one of coded-s8, 1m, 2m"
                                                            : "must be one of 1m, 2m, 4m");
    }
    return *p;
}

double txp(const json& v, const std::string& field) {
    const double x = number(v, field);
    if (x != 8.0 && x != -2.0 && x != -12.0) {
        throw SchemaViolation(field, "must be one of 8, -2, -12 dBm");
    }
    return x;
}

std::int64_t positive_duration(const json& v, const std::string& field) {
    const std::int64_t us = parse_duration_us(v, field);
    if (us <= 0) {
        throw SchemaViolation(field, "must be positive");
    }
    return us;
}

void parse_ble(const json& j, BleConfig& b, const std::string& path) {
    check_keys(j, {"connection_interval", "advertising_interval", "scan_interval", "phy", "txp", "payload"}, path);
    if (j.contains("connection_interval")) {
        b.connection_interval = Micros{positive_duration(j["connection_interval"], join(path, "connection_interval"))};
        if (b.connection_interval < Micros{7500} || b.connection_interval > Micros{4000000}) {
            throw SchemaViolation(join(path, "connection_interval"), "must be within 7.5 ms .. 4 s");
        }
    }
    if (j.contains("advertising_interval")) {
        b.advertising_interval =
            Micros{positive_duration(j["advertising_interval"], join(path, "advertising_interval"))};
    }
    if (j.contains("scan_interval")) {
        b.scan_interval = Micros{positive_duration(j["scan_interval"], join(path, "scan_interval"))};
    }
    if (j.contains("phy")) b.phy = phy(j["phy"], join(path, "phy"), Protocol::Ble);
    if (j.contains("txp")) b.txp_dbm = txp(j["txp"], join(path, "txp"));
    if (j.contains("payload")) b.payload = static_cast<int>(integer(j["payload"], join(path, "payload"), 0, 244));
}

void parse_esb(const json& j, EsbConfig& e, const std::string& path) {
    check_keys(j, {"phy", "txp", "payload", "ack_payload", "retransmit_delay", "max_retries", "retry_on_ack_loss"},
               path);
    if (j.contains("phy")) e.phy = phy(j["phy"], join(path, "phy"), Protocol::Esb);
    if (j.contains("txp")) e.txp_dbm = txp(j["txp"], join(path, "txp"));
    if (j.contains("payload")) e.payload = static_cast<int>(integer(j["payload"], join(path, "payload"), 0, 252));
    if (j.contains("ack_payload")) {
        e.ack_payload = static_cast<int>(integer(j["ack_payload"], join(path, "ack_payload"), 0, 252));
    }
    if (j.contains("retransmit_delay")) {
        e.retransmit_delay = Micros{parse_duration_us(j["retransmit_delay"], join(path, "retransmit_delay"))};
        if (e.retransmit_delay.count() < 0) {
            throw SchemaViolation(join(path, "retransmit_delay"), "must be non-negative");
        }
    }
    if (j.contains("max_retries")) {
        e.max_retries = static_cast<int>(integer(j["max_retries"], join(path, "max_retries"), 0, 15));
    }
    if (j.contains("retry_on_ack_loss")) {
        e.retry_on_ack_loss = boolean(j["retry_on_ack_loss"], join(path, "retry_on_ack_loss"));
    }
}

void parse_channel(const json& j, Scenario& s) {
    check_keys(j, {"attenuation_db", "ble_attenuation_db", "esb_attenuation_db", "rssi_sweep"}, "channel");
    auto att = [](const json& v, const std::string& f) {
        const double x = number(v, f);
        if (x < 0.0) {
            throw SchemaViolation(f, "must be >= 0");
        }
        return x;
    };
    if (j.contains("attenuation_db")) {
        s.channel.ble_attenuation_db = s.channel.esb_attenuation_db =
            att(j["attenuation_db"], "channel.attenuation_db");
    }
    if (j.contains("ble_attenuation_db")) {
        s.channel.ble_attenuation_db = att(j["ble_attenuation_db"], "channel.ble_attenuation_db");
    }
    if (j.contains("esb_attenuation_db")) {
        s.channel.esb_attenuation_db = att(j["esb_attenuation_db"], "channel.esb_attenuation_db");
    }
    if (j.contains("rssi_sweep")) {
        if (!j["rssi_sweep"].is_array()) {
            throw SchemaViolation("channel.rssi_sweep", "must be an array of dBm values");
        }
        for (std::size_t i = 0; i < j["rssi_sweep"].size(); ++i) {
            s.rssi_sweep.push_back(number(j["rssi_sweep"][i], fmt::format("channel.rssi_sweep[{}]", i)));
        }
    }
}

void parse_mode(const json& j, Scenario& s) {
    auto mode_of = [](const std::string& text) {
        if (text == "ble-only") return CoexMode::BleOnly;
        if (text == "esb-only") return CoexMode::EsbOnly;
        if (text == "concurrent") return CoexMode::Concurrent;
        throw SchemaViolation("mode", "must be one of ble-only, esb-only, concurrent");
    };
    if (j.is_string()) {
        s.mode = mode_of(j.get<std::string>());
        return;
    }
    check_keys(j, {"mode", "inactive"}, "mode");
    if (j.contains("mode")) s.mode = mode_of(string(j["mode"], "mode.mode"));
    if (j.contains("inactive")) {
        const std::string d = string(j["inactive"], "mode.inactive");
        if (d == "standby") {
            s.inactive = Disposition::Standby;
        } else if (d == "shutdown") {
            s.inactive = Disposition::Shutdown;
        } else {
            throw SchemaViolation("mode.inactive", "must be standby or shutdown");
        }
    }
}

void parse_commands(const json& j, Scenario& s) {
    if (!j.is_array()) {
        throw SchemaViolation("commands", "must be an array");
    }
    std::int64_t last = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = fmt::format("commands[{}]", i);
        check_keys(j[i], {"at_us", "command", "args"}, path);
        if (!j[i].contains("at_us") || !j[i].contains("command")) {
            throw SchemaViolation(path, "needs at_us and command");
        }
        Command c;
        c.at_us = parse_duration_us(j[i]["at_us"], path + ".at_us");
        c.command = string(j[i]["command"], path + ".command");
        static const std::set<std::string> known{"set_txp", "set_phy", "handover", "demand"};
        if (!known.contains(c.command)) {
            throw SchemaViolation(path + ".command", "must be one of set_txp, set_phy, handover, demand");
        }
        if (c.at_us < last) {
            throw SchemaViolation(path + ".at_us", "commands must be in time order");
        }
        last = c.at_us;
        if (j[i].contains("args")) {
            if (!j[i]["args"].is_object()) {
                throw SchemaViolation(path + ".args", "must be an object");
            }
            c.args = j[i]["args"];
        }
        s.commands.push_back(std::move(c));
    }
}

void parse_params(const json& j, ExperimentParams& p) {
    check_keys(j, {"proto", "runs", "period", "direction", "scenario", "transactions", "ack_payloads", "intervals"},
               "params");
    if (j.contains("proto")) {
        p.proto = string(j["proto"], "params.proto");
        if (*p.proto != "hybrid" && !parse_protocol(*p.proto)) {
            throw SchemaViolation("params.proto", "must be ble, esb or hybrid");
        }
    }
    if (j.contains("runs")) p.runs = static_cast<int>(integer(j["runs"], "params.runs", 1, 1000000));
    if (j.contains("period")) p.period_us = positive_duration(j["period"], "params.period");
    if (j.contains("direction")) p.direction = string(j["direction"], "params.direction");
    if (j.contains("scenario")) p.scenario = string(j["scenario"], "params.scenario");
    if (j.contains("transactions")) {
        p.transactions = static_cast<int>(integer(j["transactions"], "params.transactions", 1, 10000000));
    }
    if (j.contains("ack_payloads")) {
        if (!j["ack_payloads"].is_array()) {
            throw SchemaViolation("params.ack_payloads", "must be an array");
        }
        std::vector<int> ms;
        for (const auto& v : j["ack_payloads"]) {
            ms.push_back(static_cast<int>(integer(v, "params.ack_payloads", 0, 252)));
        }
        p.ack_payloads = ms;
    }
    if (j.contains("intervals")) {
        if (!j["intervals"].is_array()) {
            throw SchemaViolation("params.intervals", "must be an array");
        }
        std::vector<std::int64_t> cis;
        for (const auto& v : j["intervals"]) {
            cis.push_back(positive_duration(v, "params.intervals"));
        }
        p.intervals_us = cis;
    }
}

int line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::int64_t parse_duration_us(const json& value, const std::string& field) {
    if (value.is_number_integer() || value.is_number_unsigned()) {
        return value.get<std::int64_t>();
    }
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (d != std::floor(d)) {
            throw SchemaViolation(field, "microsecond values must be whole numbers");
        }
        return static_cast<std::int64_t>(d);
    }
    if (!value.is_string()) {
        throw SchemaViolation(field, "must be a duration like 7.5ms, 600us or 10s");
    }
    const std::string text = value.get<std::string>();
    std::size_t pos = 0;
    double magnitude = 0.0;
    try {
        magnitude = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw SchemaViolation(field, "must be a duration like 7.5ms, 600us or 10s");
    }
    const std::string unit = text.substr(pos);
    double scale = 0.0;
    if (unit == "us") {
        scale = 1.0;
    } else if (unit == "ms") {
        scale = 1e3;
    } else if (unit == "s") {
        scale = 1e6;
    } else {
        throw SchemaViolation(field, "unit must be us, ms or s");
    }
    const double us = magnitude * scale;
    if (std::abs(us - std::round(us)) > 1e-6) {
        throw SchemaViolation(field, "does not resolve to whole microseconds");
    }
    return static_cast<std::int64_t>(std::llround(us));
}

Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), line_of(text, e.byte == 0 ? 0 : e.byte - 1), "$");
    }
    check_keys(j, {"name", "seed", "horizon_us", "ble", "esb", "channel", "mode", "commands", "outputs", "params"}, "");
    Scenario s;
    if (j.contains("name")) s.name = string(j["name"], "name");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0)) {
            throw SchemaViolation("seed", "must be a non-negative integer");
        }
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("horizon_us")) s.horizon_us = positive_duration(j["horizon_us"], "horizon_us");
    if (j.contains("ble")) parse_ble(j["ble"], s.ble, "ble");
    if (j.contains("esb")) parse_esb(j["esb"], s.esb, "esb");
    s.channel.ble_txp_dbm = s.ble.txp_dbm;
    s.channel.esb_txp_dbm = s.esb.txp_dbm;
    if (j.contains("channel")) parse_channel(j["channel"], s);
    if (j.contains("mode")) parse_mode(j["mode"], s);
    if (j.contains("commands")) parse_commands(j["commands"], s);
    if (j.contains("outputs")) {
        check_keys(j["outputs"], {"trace", "slots", "report"}, "outputs");
        const json& o = j["outputs"];
        if (o.contains("trace")) s.outputs.trace = boolean(o["trace"], "outputs.trace");
        if (o.contains("slots")) s.outputs.slots = boolean(o["slots"], "outputs.slots");
        if (o.contains("report")) s.outputs.report = boolean(o["report"], "outputs.report");
    }
    if (j.contains("params")) parse_params(j["params"], s.params);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path, 0, "$");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

const json& scenario_schema() {
    static const json schema = json::parse(R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "coexsim scenario",
  "type": "object",
  "additionalProperties": false,
  "definitions": {
    "duration": {
      "oneOf": [
        {"type": "integer", "description": "microseconds"},
        {"type": "string", "pattern": "^[0-9]+(\\.[0-9]+)?(us|ms|s)$"}
      ]
    },
    "txp": {"enum": [8, -2, -12]}
  },
  "properties": {
    "name": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0},
    "horizon_us": {"$ref": "#/definitions/duration"},
    "ble": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "connection_interval": {"$ref": "#/definitions/duration", "default": "100ms"},
        "advertising_interval": {"$ref": "#/definitions/duration", "default": "100ms"},
        "scan_interval": {"$ref": "#/definitions/duration", "default": "2.5ms"},
        "phy": {"enum": ["coded-s8", "1m", "2m"], "default": "2m"},
        "txp": {"$ref": "#/definitions/txp", "default": 8},
        "payload": {"type": "integer", "minimum": 0, "maximum": 244, "default": 244}
      }
    },
    "esb": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "phy": {"enum": ["1m", "2m", "4m"], "default": "4m"},
        "txp": {"$ref": "#/definitions/txp", "default": 8},
        "payload": {"type": "integer", "minimum": 0, "maximum": 252, "default": 252},
        "ack_payload": {"type": "integer", "minimum": 0, "maximum": 252, "default": 0},
        "retransmit_delay": {"$ref": "#/definitions/duration", "default": "600us"},
        "max_retries": {"type": "integer", "minimum": 0, "maximum": 15, "default": 3},
        "retry_on_ack_loss": {"type": "boolean", "default": false}
      }
    },
    "channel": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "attenuation_db": {"type": "number", "minimum": 0},
        "ble_attenuation_db": {"type": "number", "minimum": 0, "default": 41},
        "esb_attenuation_db": {"type": "number", "minimum": 0, "default": 39},
        "rssi_sweep": {"type": "array", "items": {"type": "number"}}
      }
    },
    "mode": {
      "oneOf": [
        {"enum": ["ble-only", "esb-only", "concurrent"]},
        {"type": "object", "additionalProperties": false,
         "properties": {"mode": {"enum": ["ble-only", "esb-only", "concurrent"]},
                        "inactive": {"enum": ["standby", "shutdown"]}}}
      ]
    },
    "commands": {
      "type": "array",
      "items": {
        "type": "object", "additionalProperties": false, "required": ["at_us", "command"],
        "properties": {
          "at_us": {"$ref": "#/definitions/duration"},
          "command": {"enum": ["set_txp", "set_phy", "handover", "demand"]},
          "args": {"type": "object"}
        }
      }
    },
    "outputs": {
      "type": "object", "additionalProperties": false,
      "properties": {"trace": {"type": "boolean"}, "slots": {"type": "boolean"}, "report": {"type": "boolean"}}
    },
    "params": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "proto": {"enum": ["ble", "esb", "hybrid"]},
        "runs": {"type": "integer", "minimum": 1},
        "period": {"$ref": "#/definitions/duration"},
        "direction": {"type": "string"},
        "scenario": {"type": "string"},
        "transactions": {"type": "integer", "minimum": 1},
        "ack_payloads": {"type": "array", "items": {"type": "integer"}},
        "intervals": {"type": "array", "items": {"$ref": "#/definitions/duration"}}
      }
    }
  }
})");
    return schema;
}

json to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["horizon_us"] = s.horizon_us;
    j["ble"] = {{"connection_interval", s.ble.connection_interval.count()},
                {"advertising_interval", s.ble.advertising_interval.count()},
                {"scan_interval", s.ble.scan_interval.count()},
                {"phy", std::string(to_string(s.ble.phy))},
                {"txp", s.ble.txp_dbm},
                {"payload", s.ble.payload}};
    j["esb"] = {{"phy", std::string(to_string(s.esb.phy))},
                {"txp", s.esb.txp_dbm},
                {"payload", s.esb.payload},
                {"ack_payload", s.esb.ack_payload},
                {"retransmit_delay", s.esb.retransmit_delay.count()},
                {"max_retries", s.esb.max_retries},
                {"retry_on_ack_loss", s.esb.retry_on_ack_loss}};
    j["channel"] = {{"ble_attenuation_db", s.channel.ble_attenuation_db},
                    {"esb_attenuation_db", s.channel.esb_attenuation_db},
                    {"rssi_sweep", s.rssi_sweep}};
    j["mode"] = {{"mode", std::string(to_string(s.mode))},
                 {"inactive", s.inactive == Disposition::Standby ? "standby" : "shutdown"}};
    j["commands"] = json::array();
    for (const Command& c : s.commands) {
        j["commands"].push_back({{"at_us", c.at_us}, {"command", c.command}, {"args", c.args}});
    }
    j["outputs"] = {{"trace", s.outputs.trace}, {"slots", s.outputs.slots}, {"report", s.outputs.report}};
    return j;
}

}  // namespace coexsim
