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

#include <coexsim/error.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace coexsim {

enum class Protocol : std::uint8_t { Ble, Esb };

/// Union of both protocols' PHYs; `supports()` says which belong to whom.
enum class Phy : std::uint8_t { CodedS8, Phy1M, Phy2M, Phy4M };

constexpr double bits_per_us(Phy phy) noexcept {
    switch (phy) {
        case Phy::CodedS8: return 0.125;
        case Phy::Phy1M: return 1.0;
        case Phy::Phy2M: return 2.0;
        case Phy::Phy4M: return 4.0;
    }
    return 1.0;
}

constexpr bool supports(Protocol proto, Phy phy) noexcept {
    if (proto == Protocol::Ble) {
        return phy != Phy::Phy4M;
    }
    return phy != Phy::CodedS8;
}

inline void require_supported(Protocol proto, Phy phy);

std::string_view to_string(Protocol proto) noexcept;
std::string_view to_string(Phy phy) noexcept;
std::optional<Phy> parse_phy(std::string_view text) noexcept;
std::optional<Protocol> parse_protocol(std::string_view text) noexcept;

inline void require_supported(Protocol proto, Phy phy) {
    if (!supports(proto, phy)) {
        throw UnsupportedPhy(std::string(to_string(phy)) + " is not available on " +
                             std::string(to_string(proto)));
    }
}

}  // namespace coexsim
