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

#include <coexsim/phy.hpp>
#include <coexsim/sim_kernel.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace coexsim {

enum class Priority : std::uint8_t { Anchor, Opportunistic };
enum class SlotOutcome : std::uint8_t { Completed, Preempted };

struct SlotRequest {
    Protocol owner = Protocol::Esb;
    SimTime earliest_start{};
    Micros duration{0};
    Priority priority = Priority::Opportunistic;
};

struct RadioSlot {
    std::uint64_t id = 0;
    Protocol owner = Protocol::Ble;
    SimTime start{};
    SimTime end{};
    SlotOutcome outcome = SlotOutcome::Completed;
};

struct Blocked {
    SimTime retry_at{};
};

using Grant = std::variant<RadioSlot, Blocked>;

struct Utilization {
    double ble_fraction = 0.0;
    double esb_fraction = 0.0;
    double idle_fraction = 1.0;
};

/// Time-division arbitration of the shared radio. BLE anchors are reserved
/// ahead of time and always win; ESB slots are granted only when they clear
/// every known anchor by `radio_switch` on both sides. An anchor that shows up
/// on top of a running ESB slot cuts it short at the anchor start.
class RadioArbiter {
public:
    using SlotCallback = std::function<void(const RadioSlot&)>;

    RadioArbiter(Kernel& kernel, Micros radio_switch) : kernel_(kernel), switch_(radio_switch) {}

    RadioArbiter(const RadioArbiter&) = delete;
    RadioArbiter& operator=(const RadioArbiter&) = delete;

    /// Throws AnchorConflict on overlap with another anchor, SchedulingInPast
    /// if start < now().
    RadioSlot reserve_anchor(SimTime start, Micros duration);

    /// Moves the end of a reserved anchor. Growing it preempts ESB slots in
    /// the way; shrinking releases the tail.
    void resize_anchor(std::uint64_t anchor_id, SimTime new_end);

    /// Drops anchors that start after `t` (BLE going away or changing CI).
    void release_anchors_after(SimTime t);

    /// ESB request. On grant, `on_complete` fires at the slot end unless an
    /// anchor preempts it first, in which case `on_preempted` fires at the cut.
    Grant request_slot(const SlotRequest& req, SlotCallback on_complete = {}, SlotCallback on_preempted = {});

    /// Throws EmptyWindow if window_start >= window_end.
    Utilization utilization(SimTime window_start, SimTime window_end) const;

    /// Slot log in grant order; released or never-started slots are omitted.
    std::vector<RadioSlot> slots() const;
    std::optional<RadioSlot> slot(std::uint64_t id) const;
    std::optional<SimTime> next_anchor_at_or_after(SimTime t) const;
    Micros radio_switch() const noexcept { return switch_; }
    std::uint64_t preempted_count() const noexcept { return preempted_; }

private:
    struct Active {
        std::size_t log_index;
        EventHandle completion;
        SlotCallback on_preempted;
    };

    void preempt_overlapping(SimTime from, SimTime to);

    Kernel& kernel_;
    Micros switch_;
    std::vector<RadioSlot> log_;
    std::map<std::int64_t, std::size_t> anchors_;        // start_us -> log index
    std::map<std::uint64_t, Active> active_esb_;         // slot id -> in-flight state
    std::map<std::uint64_t, std::size_t> anchor_index_;  // anchor id -> log index
    std::uint64_t next_id_ = 1;
    std::uint64_t preempted_ = 0;
};

/// True iff no two slots in the log overlap in time.
bool slots_disjoint(const std::vector<RadioSlot>& slots);

std::string_view to_string(SlotOutcome outcome) noexcept;

}  // namespace coexsim
