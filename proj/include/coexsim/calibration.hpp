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

#include <coexsim/time.hpp>

#include <string>
#include <vector>

namespace coexsim {

/// Published measurements the model is calibrated against. Values are the
/// transmitter-side figures reported for the nRF54L15 benchmark.
struct ReferenceTargets {
    // Single 244-byte packet event, BLE 2M / ESB 4M.
    int single_payload_bytes = 244;
    double ble_single_event_us = 1420.0;
    double ble_single_energy_uj = 44.75;
    double esb_single_event_us = 860.0;
    double esb_single_energy_uj = 23.23;

    // Continuous streaming, power = idle + slope * throughput.
    double ble_idle_mw = 0.99;
    double esb_idle_mw = 0.55;
    double ble_slope_mw_per_kbps = 0.017;
    double esb_slope_mw_per_kbps = 0.013;
    double ble_streaming_ci_us = 7500.0;

    // Sleep-wake warm-up (advertising interval 20 ms, CI 7.5 ms).
    double ble_warmup_ms = 218.96;
    double ble_warmup_uj = 1226.55;
    double ble_advertising_uj = 219.37;
    double ble_discovery_uj = 576.45;
    double esb_warmup_ms = 12.51;
    double esb_warmup_uj = 61.71;
    double warmup_adv_interval_ms = 20.0;

    // ACK-payload capacity model.
    double fwd_numerator = 835000.0;
    double overhead_bytes_equiv = 370.0;
    double rev_numerator = 3408.0;
    int esb_max_payload = 252;

    // Handover latencies (mean, sd) in ms.
    double concurrent_ble_adjust_ms = 35.51, concurrent_ble_adjust_sd = 2.81;
    double concurrent_esb_adjust_ms = 18.07, concurrent_esb_adjust_sd = 2.04;
    double standby_to_esb_ms = 18.64, standby_to_esb_sd = 2.58;
    double standby_to_ble_ms = 49.47, standby_to_ble_sd = 29.16;
    double shutdown_to_esb_ms = 18.30, shutdown_to_esb_sd = 1.07;
    double shutdown_to_ble_ms = 309.52, shutdown_to_ble_sd = 105.09;

    // Hybrid wake-up (advertising interval 100 ms, CI 100 ms).
    double hybrid_esb_first_ms = 28.9;
    double hybrid_esb_delta_ms = 14.0;
    double hybrid_ble_connected_ms = 418.3;
    double hybrid_esb_stop_ms = 555.1;
    double hybrid_adv_interval_ms = 100.0;
    double coexistence_ci_ms = 100.0;
};

/// Constants that are not closed-form consequences of ReferenceTargets. They were
/// fitted once against simulated saturation sweeps and are frozen here.
struct FrozenFit {
    Micros ble_pdu_header{44};
    Micros ble_empty_pdu{160};
    Micros ble_event_guard{1310};
    Micros ble_coded_pdu_header{720};
    Micros ble_coded_empty_pdu{836};
    Micros ble_coded_max_pdu_time{2120};
    double ble_low_state_extra_mw = 2.0;
    int esb_header_bytes_equiv = 18;
    Micros radio_switch{1500};
    Micros ble_init{140000};
    Micros scan_response{2500};
    int connect_intervals = 2;
    int discovery_intervals = 1;
    Micros mpsl_extra_init{15000};
    Micros wakeup_takeover{20000};
    double sleep_mw = 0.0035;
};

struct BleTiming {
    Micros ifs{150};
    Micros event_overhead{444};
    Micros event_setup{90};
    Micros pdu_header{44};
    Micros empty_pdu{160};
    Micros event_guard{1310};
    Micros coded_pdu_header{720};
    Micros coded_empty_pdu{836};
    Micros coded_max_pdu_time{2120};
    int max_ll_payload = 251;
    int max_app_payload = 244;
};

struct EsbTiming {
    Micros overhead_4m{372};
    int header_bytes_equiv = 18;
    int ack_prep_ns_per_byte = 414;
    Micros tx_gap{17};
    Micros retransmit_delay{600};
    int max_retries = 3;
    int max_payload = 252;
};

/// Extra power (mW) above the awake standby floor for each activity state.
struct PowerParams {
    double standby_mw = 0.55;
    double sleep_mw = 0.0035;
    double ble_oneshot_extra = 0.0;
    double esb_oneshot_extra = 0.0;
    double ble_setup_extra = 0.0;
    double ble_data_extra = 0.0;
    double ble_low_extra = 0.0;
    double esb_tx_extra = 0.0;
    double ble_init_extra = 0.0;
    double ble_adv_extra = 0.0;
    double ble_discovery_extra = 0.0;
    double esb_init_extra = 0.0;
};

struct WarmupParams {
    Micros ble_init{140000};
    Micros scan_response{2500};
    Micros connect_fixed{25740};
    int connect_intervals = 2;
    Micros discovery_fixed{16800};
    int discovery_intervals = 1;
    Micros esb_init{11650};
    Micros mpsl_extra_init{15000};
    Micros takeover{20000};
};

struct HandoverParams {
    Micros esb_switch_base{15050};
    Micros esb_switch_jitter{6570};
    Micros ble_adjust_processing{30640};
    Micros ble_rate_tick{9730};
    Micros standby_ble_const{0};
    Micros ble_reinit{259520};
    Micros ble_reinit_jitter{350000};
};

struct Calibration {
    BleTiming ble;
    EsbTiming esb;
    Micros radio_switch{1500};
    PowerParams power;
    WarmupParams warmup;
    HandoverParams handover;
};

struct ProvenanceRow {
    std::string name;
    double value;
    std::string unit;
    std::string source;
};

struct CalibrationResult {
    Calibration calibration;
    std::vector<ProvenanceRow> provenance;
};

/// Back-solves every derivable constant from the targets; FrozenFit supplies
/// the rest. Pure and deterministic.
CalibrationResult derive_calibration(const ReferenceTargets& targets, const FrozenFit& fit);

/// derive_calibration(ReferenceTargets{}, FrozenFit{}), computed once.
const Calibration& default_calibration();

}  // namespace coexsim
