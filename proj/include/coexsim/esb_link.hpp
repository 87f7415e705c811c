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
#include <set>
#include <string_view>
#include <vector>

namespace coexsim {

struct EsbConfig {
    Phy phy = Phy::Phy4M;
    double txp_dbm = 8.0;
    int payload = 252;
    int ack_payload = 0;
    Micros retransmit_delay{600};
    int max_retries = 3;
    bool retry_on_ack_loss = false;

    /// Throws PayloadTooLarge, OutOfRange or UnsupportedPhy.
    void validate() const;
};

enum class TxOutcome : std::uint8_t { AckedOk, AckLost, Failed, Preempted };
std::string_view to_string(TxOutcome outcome) noexcept;

struct Transaction {
    std::uint64_t seq = 0;
    int fwd_bytes = 0;
    int ack_bytes = 0;
    int retries_used = 0;
    Micros airtime{0};
    TxOutcome outcome = TxOutcome::Failed;
    std::vector<SimTime> attempt_starts;
    std::vector<SimTime> attempt_ends;
};

struct AckAudit {
    std::set<std::uint64_t> expected_seqs;
    std::set<std::uint64_t> received_seqs;
};

/// |expected - received| / |expected|. Throws EmptyAudit when nothing was expected.
double audit_ack_loss(const AckAudit& audit);

/// One packet + ACK on air: (payload + ack)*8/rate + PHY-scaled overhead.
Micros esb_event_duration(int payload, int ack_payload, Phy phy, const EsbTiming& timing);

/// Radio hold per attempt: the event plus PRX time to load the ACK payload.
Micros esb_attempt_duration(int payload, int ack_payload, Phy phy, const EsbTiming& timing);

/// Back-to-back period of a saturated stream.
Micros esb_streaming_period(int payload, int ack_payload, Phy phy, const EsbTiming& timing);

enum class EsbState : std::uint8_t { Sleep, Init, Active, Standby };
std::string_view to_string(EsbState state) noexcept;

/// Primary transmitter of an ESB pipe. Forward is PTX -> PRX; the reverse
/// channel is the ACK payload.
class EsbLink {
public:
    /// attempt is zero-based; nullopt defers to the channel model.
    using LossOverride = std::function<std::optional<bool>(std::uint64_t seq, int attempt)>;

    EsbLink(Kernel& kernel, RadioArbiter& arbiter, PowerMeter& power, const Calibration& cal,
            const ChannelState& channel, EsbConfig config);

    EsbLink(const EsbLink&) = delete;
    EsbLink& operator=(const EsbLink&) = delete;

    EsbState state() const noexcept { return state_; }

    /// From Sleep: initialise, then go Active. With `under_arbiter` the
    /// multiprotocol layer adds its own start-up time. Returns when Active.
    SimTime init(bool under_arbiter = false);
    /// Active immediately (steady-state experiments).
    void assume_active();
    void standby();
    void activate();
    void power_off();

    void set_fwd_demand(Demand demand);
    void set_rev_demand(Demand demand) { rev_.set_demand(demand, kernel_.now()); }
    void offer_fwd(int bytes);
    void set_phy(Phy phy);
    void set_ack_payload(int bytes);
    void set_loss_override(LossOverride fn) { loss_override_ = std::move(fn); }
    const EsbConfig& config() const noexcept { return config_; }

    const std::vector<Transaction>& transactions() const noexcept { return done_; }
    const DeliveryLog& fwd_log() const noexcept { return fwd_log_; }
    const DeliveryLog& ack_log() const noexcept { return ack_log_; }
    AckAudit ack_audit() const;
    std::optional<SimTime> first_delivery() const noexcept { return first_delivery_; }
    PacketQueue& fwd_queue() noexcept { return fwd_; }

    void set_delivery_observer(std::function<void(SimTime)> fn) { delivery_observer_ = std::move(fn); }

    static constexpr Micros kColdGap{1000000};

private:
    void pump();
    void attempt();
    void on_attempt_end(const RadioSlot& slot, bool preempted);
    void finish(TxOutcome outcome, SimTime at);
    void wake_at(SimTime t);

    Kernel& kernel_;
    RadioArbiter& arbiter_;
    PowerMeter& power_;
    const Calibration& cal_;
    const ChannelState& channel_;
    EsbConfig config_;
    EsbState state_ = EsbState::Sleep;
    PacketQueue fwd_;
    PacketQueue rev_;
    DeliveryLog fwd_log_;
    DeliveryLog ack_log_;
    std::optional<Transaction> current_;
    bool current_one_shot_ = false;
    bool delivered_current_ = false;
    std::vector<Transaction> done_;
    std::optional<SimTime> last_tx_end_;
    std::optional<SimTime> first_delivery_;
    std::optional<EventHandle> wake_;
    std::set<std::uint64_t> ack_expected_;
    std::set<std::uint64_t> ack_received_;
    LossOverride loss_override_;
    std::function<void(SimTime)> delivery_observer_;
};

}  // namespace coexsim
