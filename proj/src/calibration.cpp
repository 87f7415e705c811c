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

#include <coexsim/calibration.hpp>

#include <cmath>

namespace coexsim {
namespace {

Micros round_us(double us) { return Micros{static_cast<std::int64_t>(std::llround(us))}; }

class Recorder {
public:
    explicit Recorder(std::vector<ProvenanceRow>& rows) : rows_(rows) {}

    double operator()(std::string name, double value, std::string unit, std::string source) {
        rows_.push_back({std::move(name), value, std::move(unit), std::move(source)});
        return value;
    }

    Micros us(std::string name, double value, std::string source) {
        Micros rounded = round_us(value);
        rows_.push_back({std::move(name), static_cast<double>(rounded.count()), "us", std::move(source)});
        return rounded;
    }

private:
    std::vector<ProvenanceRow>& rows_;
};

}  // namespace

CalibrationResult derive_calibration(const ReferenceTargets& t, const FrozenFit& fit) {
    CalibrationResult out;
    Calibration& c = out.calibration;
    Recorder rec(out.provenance);
    const double standby = t.esb_idle_mw;
    const double payload_bits = t.single_payload_bytes * 8.0;

    // BLE timing. A lone 244-byte event at 2M is setup + data PDU + IFS + empty
    // reply; the data PDU carries a PHY-independent header.
    c.ble.pdu_header = rec.us("ble.pdu_header", fit.ble_pdu_header.count(), "frozen fit");
    c.ble.empty_pdu = rec.us("ble.empty_pdu", fit.ble_empty_pdu.count(), "frozen fit");
    c.ble.event_guard = rec.us("ble.event_guard", fit.ble_event_guard.count(), "frozen fit: bidirectional slopes");
    c.ble.coded_pdu_header = rec.us("ble.coded_pdu_header", fit.ble_coded_pdu_header.count(), "frozen fit");
    c.ble.coded_empty_pdu = rec.us("ble.coded_empty_pdu", fit.ble_coded_empty_pdu.count(), "frozen fit");
    c.ble.coded_max_pdu_time = rec.us("ble.coded_max_pdu_time", fit.ble_coded_max_pdu_time.count(), "frozen fit");
    c.ble.event_overhead = rec.us("ble.event_overhead", t.ble_single_event_us - payload_bits / 2.0,
                                  "ble_single_event_us - 244*8/2");
    c.ble.event_setup =
        rec.us("ble.event_setup",
               static_cast<double>((c.ble.event_overhead - c.ble.pdu_header - c.ble.ifs - c.ble.empty_pdu).count()),
               "event_overhead - pdu_header - ifs - empty_pdu");

    // ESB timing. Streaming period per transaction must equal 2016 bits / F_max(M).
    c.esb.max_payload = t.esb_max_payload;
    c.esb.header_bytes_equiv = fit.esb_header_bytes_equiv;
    c.esb.overhead_4m = rec.us("esb.overhead_4m", t.esb_single_event_us - payload_bits / 4.0,
                               "esb_single_event_us - 244*8/4");
    const double period_per_byte_us = t.esb_max_payload * 8.0 * 1000.0 / t.fwd_numerator;
    c.esb.ack_prep_ns_per_byte = static_cast<int>(
        std::lround(rec("esb.ack_prep_ns_per_byte", (period_per_byte_us - 2.0) * 1000.0, "ns/B",
                        "slope of 2016 bits / F_max(M) minus 4M airtime")));
    const double period_at_zero = period_per_byte_us * t.overhead_bytes_equiv;
    c.esb.tx_gap = rec.us("esb.tx_gap",
                          period_at_zero - (t.esb_max_payload * 8.0 / 4.0 + c.esb.overhead_4m.count()),
                          "2016 bits / F_max(0) minus 252-byte 4M event");

    c.radio_switch = rec.us("arbiter.radio_switch", fit.radio_switch.count(), "frozen fit: ESB max at CI 7.5 ms");

    // Power. Every level below is extra power above the awake standby floor.
    PowerParams& p = c.power;
    p.standby_mw = rec("power.standby", standby, "mW", "esb_idle_mw");
    p.sleep_mw = rec("power.sleep", fit.sleep_mw, "mW", "frozen fit");
    p.ble_oneshot_extra = rec("power.ble_oneshot_extra",
                              t.ble_single_energy_uj / (t.ble_single_event_us / 1000.0) - standby, "mW",
                              "ble_single_energy_uj / ble_single_event_us - standby");
    p.esb_oneshot_extra = rec("power.esb_oneshot_extra",
                              t.esb_single_energy_uj / (t.esb_single_event_us / 1000.0) - standby, "mW",
                              "esb_single_energy_uj / esb_single_event_us - standby");
    p.esb_tx_extra = rec("power.esb_tx_extra", t.esb_slope_mw_per_kbps * t.esb_max_payload * 8.0 / period_at_zero * 1000.0,
                         "mW", "esb slope * 2016 bits / streaming period");
    p.ble_low_extra = rec("power.ble_low_extra", fit.ble_low_state_extra_mw, "mW", "frozen fit");
    {
        const double ci_ms = t.ble_streaming_ci_us / 1000.0;
        const double idle_event_uj = (t.ble_idle_mw - standby) * ci_ms;
        const double empty_exchange_us = 2.0 * c.ble.empty_pdu.count() + c.ble.ifs.count();
        const double setup_uj = idle_event_uj - p.ble_low_extra * empty_exchange_us / 1000.0;
        p.ble_setup_extra = rec("power.ble_setup_extra", setup_uj / (c.ble.event_setup.count() / 1000.0), "mW",
                                "(ble idle - standby) * CI minus empty exchange, over setup");
        const double data_pdu_us = c.ble.pdu_header.count() + t.single_payload_bytes * 8.0 / 2.0;
        const double exchange_uj = t.ble_slope_mw_per_kbps * payload_bits;
        const double rest_us = 2.0 * c.ble.ifs.count() + c.ble.empty_pdu.count();
        p.ble_data_extra = rec("power.ble_data_extra",
                               (exchange_uj - p.ble_low_extra * rest_us / 1000.0) / (data_pdu_us / 1000.0), "mW",
                               "ble slope * 1952 bits per data exchange");
    }

    // Warm-up. Fixed phases are frozen; connect_fixed closes the mean total.
    WarmupParams& w = c.warmup;
    w.ble_init = rec.us("warmup.ble_init", fit.ble_init.count(), "frozen fit");
    w.scan_response = rec.us("warmup.scan_response", fit.scan_response.count(), "frozen fit");
    w.connect_intervals = fit.connect_intervals;
    w.discovery_intervals = fit.discovery_intervals;
    w.takeover = rec.us("warmup.takeover", fit.wakeup_takeover.count(), "frozen fit");
    w.mpsl_extra_init = rec.us("warmup.mpsl_extra_init", fit.mpsl_extra_init.count(), "frozen fit");
    const double ci_us = t.ble_streaming_ci_us;
    const double adv_mean_us = t.warmup_adv_interval_ms * 1000.0 / 2.0 + w.scan_response.count();
    w.discovery_fixed = rec.us(
        "warmup.discovery_fixed",
        (t.hybrid_esb_stop_ms - t.hybrid_ble_connected_ms) * 1000.0 - w.takeover.count() -
            w.discovery_intervals * t.coexistence_ci_ms * 1000.0,
        "hybrid esb stop - ble connected - takeover - discovery intervals");
    const double discovery_us = w.discovery_fixed.count() + w.discovery_intervals * ci_us;
    w.connect_fixed = rec.us("warmup.connect_fixed",
                             t.ble_warmup_ms * 1000.0 - w.ble_init.count() - adv_mean_us -
                                 w.connect_intervals * ci_us - discovery_us - t.ble_single_event_us,
                             "ble warm-up mean minus the other phases");
    const double connect_us = w.connect_fixed.count() + w.connect_intervals * ci_us;
    p.ble_adv_extra = rec("power.ble_adv_extra", t.ble_advertising_uj / (adv_mean_us / 1000.0) - standby, "mW",
                          "advertising energy over mean advertising time");
    p.ble_discovery_extra = rec("power.ble_discovery_extra", t.ble_discovery_uj / (discovery_us / 1000.0) - standby,
                                "mW", "discovery energy over discovery time");
    p.ble_init_extra =
        rec("power.ble_init_extra",
            (t.ble_warmup_uj - t.ble_advertising_uj - t.ble_discovery_uj - t.ble_single_energy_uj) /
                    ((w.ble_init.count() + connect_us) / 1000.0) -
                standby,
            "mW", "residual warm-up energy over init + connect time");
    w.esb_init = rec.us("warmup.esb_init", (t.esb_warmup_ms - t.esb_single_event_us / 1000.0) * 1000.0,
                        "esb warm-up minus one packet");
    p.esb_init_extra = rec("power.esb_init_extra",
                           (t.esb_warmup_uj - t.esb_single_energy_uj) / (w.esb_init.count() / 1000.0) - standby,
                           "mW", "residual esb warm-up energy over init time");

    // Handover. Uniform components are sized from the reported spreads.
    HandoverParams& h = c.handover;
    const double sqrt12 = std::sqrt(12.0);
    const double to_esb_mean =
        (t.concurrent_esb_adjust_ms + t.standby_to_esb_ms + t.shutdown_to_esb_ms) / 3.0 * 1000.0;
    const double to_esb_sd = std::sqrt((t.concurrent_esb_adjust_sd * t.concurrent_esb_adjust_sd +
                                        t.standby_to_esb_sd * t.standby_to_esb_sd +
                                        t.shutdown_to_esb_sd * t.shutdown_to_esb_sd) /
                                       3.0) *
                             1000.0;
    h.esb_switch_jitter = rec.us("handover.esb_switch_jitter", to_esb_sd * sqrt12, "pooled ToEsb sd * sqrt(12)");
    h.esb_switch_base = rec.us("handover.esb_switch_base", to_esb_mean - h.esb_switch_jitter.count() / 2.0,
                               "pooled ToEsb mean - jitter/2");
    h.ble_rate_tick = rec.us("handover.ble_rate_tick", t.concurrent_ble_adjust_sd * 1000.0 * sqrt12,
                             "BleAdjust sd * sqrt(12)");
    h.ble_adjust_processing = rec.us("handover.ble_adjust_processing",
                                     t.concurrent_ble_adjust_ms * 1000.0 - h.ble_rate_tick.count() / 2.0,
                                     "BleAdjust mean - tick/2");
    h.standby_ble_const = rec.us("handover.standby_ble_const", 0.0, "anchor wait alone explains the mean");
    const double adv_us = t.hybrid_adv_interval_ms * 1000.0;
    h.ble_reinit = rec.us("handover.ble_reinit", t.shutdown_to_ble_ms * 1000.0 - adv_us / 2.0,
                          "Shutdown ToBle mean - advertising interval/2");
    const double sd_us = t.shutdown_to_ble_sd * 1000.0;
    h.ble_reinit_jitter = rec.us("handover.ble_reinit_jitter", std::sqrt(12.0 * sd_us * sd_us - adv_us * adv_us),
                                 "width so that reinit and advertising spreads add to the reported sd");
    return out;
}

const Calibration& default_calibration() {
    static const Calibration cal = derive_calibration(ReferenceTargets{}, FrozenFit{}).calibration;
    return cal;
}

}  // namespace coexsim
