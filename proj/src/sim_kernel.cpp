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

#include <coexsim/sim_kernel.hpp>

#include <coexsim/error.hpp>

#include <string>

namespace coexsim {

EventHandle Kernel::schedule(SimTime at, Action action) {
    if (at < now_) {
        throw SchedulingInPast("event at " + std::to_string(us_of(at)) + " us is before now " +
                               std::to_string(us_of(now_)) + " us");
    }
    const std::uint64_t seq = next_sequence_++;
    queue_.push(Entry{at, seq});
    actions_.emplace(seq, std::move(action));
    return EventHandle{seq, at, seq};
}

bool Kernel::cancel(const EventHandle& handle) {
    if (actions_.erase(handle.id) == 0) {
        return false;
    }
    ++cancelled_;
    return true;
}

std::uint64_t Kernel::run_until(SimTime t_end) {
    std::uint64_t fired = 0;
    while (!queue_.empty() && queue_.top().at <= t_end) {
        const Entry entry = queue_.top();
        queue_.pop();
        auto it = actions_.find(entry.sequence);
        if (it == actions_.end()) {
            continue;  // cancelled
        }
        Action action = std::move(it->second);
        actions_.erase(it);
        now_ = entry.at;
        ++fired_;
        ++fired;
        if (observer_) {
            observer_(EventHandle{entry.sequence, entry.at, entry.sequence});
        }
        action();
    }
    if (t_end > now_) {
        now_ = t_end;
    }
    return fired;
}

}  // namespace coexsim
