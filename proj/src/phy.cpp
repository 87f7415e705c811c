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

#include <coexsim/phy.hpp>

#include <algorithm>
#include <cctype>
#include <string>

namespace coexsim {

std::string_view to_string(Protocol proto) noexcept {
    return proto == Protocol::Ble ? "ble" : "esb";
}

std::string_view to_string(Phy phy) noexcept {
    switch (phy) {
        case Phy::CodedS8: return "coded-s8";
        case Phy::Phy1M: return "1m";
        case Phy::Phy2M: return "2m";
        case Phy::Phy4M: return "4m";
    }
    return "?";
}

namespace {
std::string lowered(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
}  // namespace

std::optional<Phy> parse_phy(std::string_view text) noexcept {
    const std::string s = lowered(text);
    if (s == "coded-s8" || s == "coded" || s == "s8" || s == "coded_s8") return Phy::CodedS8;
    if (s == "1m" || s == "phy1m") return Phy::Phy1M;
    if (s == "2m" || s == "phy2m") return Phy::Phy2M;
    if (s == "4m" || s == "phy4m") return Phy::Phy4M;
    return std::nullopt;
}

std::optional<Protocol> parse_protocol(std::string_view text) noexcept {
    const std::string s = lowered(text);
    if (s == "ble") return Protocol::Ble;
    if (s == "esb") return Protocol::Esb;
    return std::nullopt;
}

}  // namespace coexsim
