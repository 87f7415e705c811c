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

#include <chrono>
#include <cstdint>

namespace coexsim {

/// Virtual clock tag. Never read for wall time; it only anchors SimTime.
struct SimClock {
    using rep = std::int64_t;
    using period = std::micro;
    using duration = std::chrono::microseconds;
    using time_point = std::chrono::time_point<SimClock, duration>;
    static constexpr bool is_steady = true;
};

using Micros = std::chrono::microseconds;
using SimTime = SimClock::time_point;

constexpr SimTime at_us(std::int64_t us) noexcept { return SimTime{Micros{us}}; }
constexpr std::int64_t us_of(SimTime t) noexcept { return t.time_since_epoch().count(); }
constexpr std::int64_t us_of(Micros d) noexcept { return d.count(); }
constexpr double ms_of(Micros d) noexcept { return static_cast<double>(d.count()) / 1000.0; }
constexpr double ms_of(SimTime t) noexcept { return ms_of(t.time_since_epoch()); }

inline constexpr SimTime kTimeZero{};

}  // namespace coexsim
