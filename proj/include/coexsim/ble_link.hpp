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

#include <coexsim/calibration.hpp>
#include <coexsim/channel_power.hpp>
#include <coexsim/phy.hpp>
#include <coexsim/radio_arbiter.hpp>
#include <coexsim/sim_kernel.hpp>
#include <coexsim/traffic.hpp>

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace coexsim {

struct BleConfig {
    Micros connection_interval{100000};
    Micros advertising_interval{100000};
    Micros scan_interval{2500};
    Phy phy = Phy::Phy2M;
    double txp_dbm = 8.0;
    int payload = 244;

    /// Throws PayloadTooLarge, InvalidInterval or UnsupportedPhy.
    void validate() const;
};

enum class BleState : std::uint8_t {
    Sleep,
    Init,
    Advertising,
    Connecting,
    ServiceDiscovery,
    Connected,
    Standby,
    Shutdown,
};

std::string_view to_string(BleState state) noexcept;
bool is_legal_transition(BleState from, BleState to) noexcept;

struct StateChange {
    SimTime at;
    BleState from;
    BleState to;
};

struct PduExchange {
    int fwd_bytes = 0;
    int rev_bytes = 0;
    bool retransmitted = false;
    Micros airtime{0};
    bool fwd_delivered = false;
    bool rev_delivered = false;
};

struct WarmupTimeline {
    SimTime wake{};
    SimTime init_done{};
    SimTime adv_done{};
    SimTime connected{};
    SimTime discovery_done{};
};

/// Single-event time for one `payload`-byte PDU: payload*8/rate + overhead.
Micros ble_event_duration(int payload, Phy phy, const BleTiming& timing);

/// On-air time of one data PDU (0 bytes means an empty PDU).
Micros ble_pdu_airtime(int bytes, Phy phy, const BleTiming& timing);

/// Largest link-layer payload that fits one PDU on this PHY.
int ble_max_ll_payload(Phy phy, const BleTiming& timing);

/// Time available for exchanges inside one connection event.
Micros ble_exchange_window(Micros connection_interval, const BleTiming& timing);

/// Deterministic warm-up schedule for a given advertising phase.
WarmupTimeline plan_ble_warmup(const BleConfig& config, const WarmupParams& params, SimTime wake, Micros adv_wait);

struct ConnectionEventRecord {
    SimTime anchor;
    Micros duration;
    int exchanges;
    bool one_shot;
};

/// Central side of one BLE connection. Forward is central -> peripheral.
class BleLink {
public:
    BleLink(Kernel& kernel, RadioArbiter& arbiter, PowerMeter& power, const Calibration& cal,
            const ChannelState& channel, BleConfig config);

    BleLink(const BleLink&) = delete;
    BleLink& operator=(const BleLink&) = delete;

    BleState state() const noexcept { return state_; }
    const std::vector<StateChange>& state_log() const noexcept { return state_log_; }

    /// Throws IllegalTransition if the move is not allowed.
    void transition(BleState to);

    /// From Sleep or Shutdown: init, advertising, connecting, discovery, then
    /// Connected with the first anchor at discovery completion. `adv_wait`
    /// overrides the random advertising phase.
    WarmupTimeline warmup(std::optional<Micros> adv_wait = std::nullopt);

    /// Skips warm-up: walks the state chain instantly and starts anchors.
    void assume_connected(SimTime first_anchor);

    /// Connected <-> Standby. Standby keeps the connection but sends no data.
    void enter_standby();
    void resume();
    /// Standby -> Connected at the next anchor strictly after now; `on_effective`
    /// receives that anchor time.
    void resume_at_next_anchor(std::function<void(SimTime)> on_effective);

    /// Stops anchors and powers BLE down.
    void shutdown();
    void sleep();

    void set_fwd_demand(Demand demand) { fwd_.set_demand(demand, kernel_.now()); }
    void set_rev_demand(Demand demand) { rev_.set_demand(demand, kernel_.now()); }
    void offer_fwd(int bytes) { fwd_.push(bytes); }
    void set_phy(Phy phy);
    void set_connection_interval(Micros ci);
    const BleConfig& config() const noexcept { return config_; }

    /// Packs one event into `anchor` and returns its data exchanges. Exposed so
    /// tests can drive events without the anchor schedule.
    std::vector<PduExchange> run_connection_event(const RadioSlot& anchor);

    const DeliveryLog& fwd_log() const noexcept { return fwd_log_; }
    const DeliveryLog& rev_log() const noexcept { return rev_log_; }
    PacketQueue& fwd_queue() noexcept { return fwd_; }
    PacketQueue& rev_queue() noexcept { return rev_; }
    const std::vector<ConnectionEventRecord>& events() const noexcept { return events_; }
    std::optional<SimTime> next_anchor() const noexcept { return next_anchor_; }

    /// Called at the start of every anchor, after the event is planned.
    void set_anchor_observer(std::function<void(SimTime)> observer) { anchor_observer_ = std::move(observer); }
    /// Called when warm-up reaches Connected.
    void set_connected_observer(std::function<void(const WarmupTimeline&)> observer) {
        connected_observer_ = std::move(observer);
    }

    /// A data event more than this long after the previous one runs at the
    /// one-shot power level.
    static constexpr Micros kColdGap{1000000};

private:
    void set_state(BleState to);
    void schedule_anchor(SimTime at);
    void on_anchor(std::uint64_t anchor_id, SimTime at);
    Micros nominal_event() const;

    Kernel& kernel_;
    RadioArbiter& arbiter_;
    PowerMeter& power_;
    const Calibration& cal_;
    const ChannelState& channel_;
    BleConfig config_;
    BleState state_ = BleState::Sleep;
    std::vector<StateChange> state_log_;
    PacketQueue fwd_;
    PacketQueue rev_;
    DeliveryLog fwd_log_;
    DeliveryLog rev_log_;
    std::vector<ConnectionEventRecord> events_;
    std::optional<SimTime> next_anchor_;
    std::optional<EventHandle> anchor_event_;
    std::optional<SimTime> last_data_event_;
    bool anchors_running_ = false;
    std::function<void(SimTime)> anchor_observer_;
    std::function<void(const WarmupTimeline&)> connected_observer_;
    std::vector<EventHandle> warmup_events_;
    std::optional<std::pair<SimTime, std::function<void(SimTime)>>> pending_resume_;
};

}  // namespace coexsim
