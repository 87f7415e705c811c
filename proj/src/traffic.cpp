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

#include <coexsim/traffic.hpp>

#include <algorithm>
#include <cmath>

namespace coexsim {

void PacketQueue::set_demand(Demand demand, SimTime now) {
    accrue(now);
    demand_ = demand;
    last_ = now;
}

void PacketQueue::accrue(SimTime now) {
    if (now <= last_) {
        return;
    }
    if (!demand_.saturate && demand_.kbps > 0.0) {
        const double bits = carry_bits_ + demand_.kbps * static_cast<double>(us_of(now - last_)) / 1000.0;
        const double packet_bits = packet_bytes_ * 8.0;
        const auto n = static_cast<std::int64_t>(std::floor(bits / packet_bits));
        carry_bits_ = bits - static_cast<double>(n) * packet_bits;
        for (std::int64_t i = 0; i < n; ++i) {
            push(packet_bytes_);
        }
    }
    last_ = now;
}

void PacketQueue::push(int bytes) {
    if (backlog_ + bytes > capacity_) {
        ++next_seq_;
        ++dropped_;
        return;
    }
    packets_.push_back(Packet{next_seq_++, bytes, 0, 0});
    backlog_ += bytes;
}

Packet& PacketQueue::front() {
    if (packets_.empty() && demand_.saturate) {
        packets_.push_back(Packet{next_seq_++, packet_bytes_, 0, 0});
        backlog_ += packet_bytes_;
    }
    return packets_.front();
}

void PacketQueue::pop() {
    if (!packets_.empty()) {
        backlog_ -= packets_.front().bytes - packets_.front().sent;
        packets_.pop_front();
    }
}

std::optional<SimTime> PacketQueue::next_arrival(SimTime now) const {
    if (demand_.saturate || demand_.kbps <= 0.0) {
        return std::nullopt;
    }
    const SimTime base = std::max(now, last_);
    const double carry = carry_bits_ + demand_.kbps * static_cast<double>(us_of(base - last_)) / 1000.0;
    const double missing = packet_bytes_ * 8.0 - carry;
    if (missing <= 0.0) {
        return base;
    }
    const auto wait = static_cast<std::int64_t>(std::ceil(missing * 1000.0 / demand_.kbps));
    return base + Micros{std::max<std::int64_t>(wait, 1)};
}

bool DeliveryLog::deliver(std::uint64_t key, int bytes, SimTime at) {
    if (!received_.insert(key).second) {
        ++duplicates_;
        return false;
    }
    entries_.push_back({at, bytes});
    return true;
}

std::int64_t DeliveryLog::bytes_between(SimTime t0, SimTime t1) const {
    std::int64_t total = 0;
    for (const Entry& e : entries_) {
        if (e.at >= t0 && e.at < t1) {
            total += e.bytes;
        }
    }
    return total;
}

double DeliveryLog::kbps(SimTime t0, SimTime t1) const {
    if (t1 <= t0) {
        return 0.0;
    }
    return static_cast<double>(bytes_between(t0, t1)) * 8.0 * 1000.0 / static_cast<double>(us_of(t1 - t0));
}

}  // namespace coexsim
