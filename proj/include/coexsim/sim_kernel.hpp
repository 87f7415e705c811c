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

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <unordered_map>
#include <vector>

namespace coexsim {

/// Single RNG stream owned by a kernel. Draws are made only from inside
/// event callbacks (or before the run starts) so replay is exact.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 bits of resolution; independent of the
    /// standard library's distribution implementations.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return p > 0.0 && uniform01() < p; }

    /// Uniform integer microseconds in [0, span). span <= 0 yields 0.
    Micros uniform_below(Micros span) {
        if (span.count() <= 0) {
            return Micros{0};
        }
        return Micros{static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(span.count()))};
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct EventHandle {
    std::uint64_t id = 0;
    SimTime fire_at{};
    std::uint64_t sequence = 0;
};

/// Discrete-event engine with an integer-microsecond virtual clock.
///
/// Events fire in (fire_at, sequence) order, where sequence is the insertion
/// counter. Cancelled events never fire. One instance is one isolated world:
/// nothing here is shared between kernels.
class Kernel {
public:
    using Action = std::function<void()>;
    using FireObserver = std::function<void(const EventHandle&)>;

    explicit Kernel(std::uint64_t seed = 1) : rng_(seed) {}

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    SimTime now() const noexcept { return now_; }
    Rng& rng() noexcept { return rng_; }

    /// Throws SchedulingInPast if `at` < now().
    EventHandle schedule(SimTime at, Action action);
    EventHandle schedule_in(Micros delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    /// True iff the event was still pending.
    bool cancel(const EventHandle& handle);

    bool is_pending(const EventHandle& handle) const { return actions_.contains(handle.id); }

    /// Fires everything with fire_at <= t_end, then sets now() = t_end.
    std::uint64_t run_until(SimTime t_end);

    std::uint64_t scheduled_count() const noexcept { return next_sequence_; }
    std::uint64_t fired_count() const noexcept { return fired_; }
    std::uint64_t cancelled_count() const noexcept { return cancelled_; }
    std::uint64_t pending_count() const noexcept { return actions_.size(); }

    void set_fire_observer(FireObserver observer) { observer_ = std::move(observer); }

private:
    struct Entry {
        SimTime at;
        std::uint64_t sequence;

        bool operator>(const Entry& other) const noexcept {
            return at != other.at ? at > other.at : sequence > other.sequence;
        }
    };

    SimTime now_{};
    Rng rng_;
    std::uint64_t next_sequence_ = 0;
    std::uint64_t fired_ = 0;
    std::uint64_t cancelled_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    std::unordered_map<std::uint64_t, Action> actions_;
    FireObserver observer_;
};

}  // namespace coexsim
