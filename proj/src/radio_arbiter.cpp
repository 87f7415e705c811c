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

#include <coexsim/radio_arbiter.hpp>

#include <algorithm>

namespace coexsim {

RadioSlot RadioArbiter::reserve_anchor(SimTime start, Micros duration) {
    if (start < kernel_.now()) {
        throw SchedulingInPast("anchor at " + std::to_string(us_of(start)) + " us is before now");
    }
    if (duration.count() <= 0) {
        throw AnchorConflict("anchor duration must be positive");
    }
    const SimTime end = start + duration;
    auto next = anchors_.lower_bound(us_of(start));
    if (next != anchors_.end() && log_[next->second].start < end) {
        throw AnchorConflict("anchor at " + std::to_string(us_of(start)) + " us overlaps anchor at " +
                             std::to_string(next->first) + " us");
    }
    if (next != anchors_.begin() && log_[std::prev(next)->second].end > start) {
        throw AnchorConflict("anchor at " + std::to_string(us_of(start)) + " us overlaps anchor at " +
                             std::to_string(std::prev(next)->first) + " us");
    }
    RadioSlot slot{next_id_++, Protocol::Ble, start, end, SlotOutcome::Completed};
    anchors_.emplace(us_of(start), log_.size());
    anchor_index_.emplace(slot.id, log_.size());
    log_.push_back(slot);
    preempt_overlapping(start, end);
    return slot;
}

void RadioArbiter::resize_anchor(std::uint64_t anchor_id, SimTime new_end) {
    auto it = anchor_index_.find(anchor_id);
    if (it == anchor_index_.end()) {
        throw AnchorConflict("unknown anchor " + std::to_string(anchor_id));
    }
    RadioSlot& slot = log_[it->second];
    if (new_end <= slot.start) {
        throw AnchorConflict("anchor must keep a positive duration");
    }
    if (new_end > slot.end) {
        auto next = anchors_.upper_bound(us_of(slot.start));
        if (next != anchors_.end() && log_[next->second].start < new_end) {
            throw AnchorConflict("extended anchor runs into the next anchor");
        }
        const SimTime old_end = slot.end;
        slot.end = new_end;
        preempt_overlapping(old_end, new_end);
    } else {
        slot.end = new_end;
    }
}

void RadioArbiter::release_anchors_after(SimTime t) {
    auto it = anchors_.upper_bound(us_of(t));
    while (it != anchors_.end()) {
        RadioSlot& slot = log_[it->second];
        anchor_index_.erase(slot.id);
        slot.end = slot.start;
        it = anchors_.erase(it);
    }
}

void RadioArbiter::preempt_overlapping(SimTime from, SimTime to) {
    for (auto it = active_esb_.begin(); it != active_esb_.end();) {
        RadioSlot& slot = log_[it->second.log_index];
        if (slot.start < to && from < slot.end) {
            kernel_.cancel(it->second.completion);
            slot.end = std::max(slot.start, from);
            slot.outcome = SlotOutcome::Preempted;
            ++preempted_;
            const SimTime fire_at = std::max(slot.end, kernel_.now());
            if (it->second.on_preempted) {
                kernel_.schedule(fire_at, [cb = std::move(it->second.on_preempted), copy = slot] { cb(copy); });
            }
            it = active_esb_.erase(it);
        } else {
            ++it;
        }
    }
}

Grant RadioArbiter::request_slot(const SlotRequest& req, SlotCallback on_complete, SlotCallback on_preempted) {
    const SimTime start = std::max(req.earliest_start, kernel_.now());
    const SimTime end = start + req.duration;
    // Anchors whose switch-padded window could touch [start, end).
    auto it = anchors_.upper_bound(us_of(start));
    if (it != anchors_.begin()) {
        --it;
    }
    for (; it != anchors_.end(); ++it) {
        const RadioSlot& anchor = log_[it->second];
        if (anchor.start - switch_ >= end) {
            break;
        }
        if (anchor.end + switch_ > start) {
            return Blocked{anchor.end + switch_};
        }
    }
    for (const auto& [id, active] : active_esb_) {
        const RadioSlot& other = log_[active.log_index];
        if (other.start < end && start < other.end) {
            return Blocked{other.end};
        }
    }
    RadioSlot slot{next_id_++, req.owner, start, end, SlotOutcome::Completed};
    const std::size_t index = log_.size();
    log_.push_back(slot);
    EventHandle done = kernel_.schedule(end, [this, id = slot.id, index, cb = std::move(on_complete)] {
        active_esb_.erase(id);
        if (cb) {
            cb(log_[index]);
        }
    });
    active_esb_.emplace(slot.id, Active{index, done, std::move(on_preempted)});
    return slot;
}

Utilization RadioArbiter::utilization(SimTime window_start, SimTime window_end) const {
    if (window_start >= window_end) {
        throw EmptyWindow("utilization window is empty");
    }
    std::int64_t ble = 0;
    std::int64_t esb = 0;
    for (const RadioSlot& slot : log_) {
        const SimTime a = std::max(slot.start, window_start);
        const SimTime b = std::min(slot.end, window_end);
        if (a < b) {
            (slot.owner == Protocol::Ble ? ble : esb) += us_of(b - a);
        }
    }
    const double span = static_cast<double>(us_of(window_end - window_start));
    Utilization u;
    u.ble_fraction = static_cast<double>(ble) / span;
    u.esb_fraction = static_cast<double>(esb) / span;
    u.idle_fraction = 1.0 - u.ble_fraction - u.esb_fraction;
    return u;
}

std::vector<RadioSlot> RadioArbiter::slots() const {
    std::vector<RadioSlot> out;
    out.reserve(log_.size());
    std::copy_if(log_.begin(), log_.end(), std::back_inserter(out),
                 [](const RadioSlot& s) { return s.start < s.end; });
    return out;
}

std::optional<RadioSlot> RadioArbiter::slot(std::uint64_t id) const {
    for (const RadioSlot& s : log_) {
        if (s.id == id) {
            return s;
        }
    }
    return std::nullopt;
}

std::optional<SimTime> RadioArbiter::next_anchor_at_or_after(SimTime t) const {
    auto it = anchors_.lower_bound(us_of(t));
    if (it == anchors_.end()) {
        return std::nullopt;
    }
    return log_[it->second].start;
}

bool slots_disjoint(const std::vector<RadioSlot>& slots) {
    std::vector<RadioSlot> sorted(slots);
    std::sort(sorted.begin(), sorted.end(), [](const RadioSlot& a, const RadioSlot& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].start < sorted[i - 1].end) {
            return false;
        }
    }
    return true;
}

std::string_view to_string(SlotOutcome outcome) noexcept {
    return outcome == SlotOutcome::Completed ? "completed" : "preempted";
}

}  // namespace coexsim
