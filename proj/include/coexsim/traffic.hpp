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
#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

namespace coexsim {

/// Offered load for one direction of one link.
struct Demand {
    double kbps = 0.0;
    bool saturate = false;

    static Demand saturated() { return {0.0, true}; }
    static Demand rate(double kbps) { return {kbps, false}; }
    static Demand none() { return {}; }
    bool idle() const noexcept { return !saturate && kbps <= 0.0; }
};

struct Packet {
    std::uint64_t seq = 0;
    int bytes = 0;
    int sent = 0;      // bytes already delivered (fragmented links)
    int fragment = 0;  // next fragment index
};

/// Application transmit buffer. A rate demand produces fixed-size packets on a
/// deterministic fractional schedule; a saturated demand never runs dry.
/// Arrivals that do not fit in `capacity_bytes` are dropped.
class PacketQueue {
public:
    explicit PacketQueue(int packet_bytes = 244, std::int64_t capacity_bytes = 65536)
        : packet_bytes_(packet_bytes), capacity_(capacity_bytes) {}

    void set_demand(Demand demand, SimTime now);
    const Demand& demand() const noexcept { return demand_; }
    void set_packet_bytes(int bytes) { packet_bytes_ = bytes; }
    int packet_bytes() const noexcept { return packet_bytes_; }

    /// Adds whatever the rate demand produced since the previous call.
    void accrue(SimTime now);
    void push(int bytes);

    bool empty() const noexcept { return !demand_.saturate && packets_.empty(); }
    Packet& front();
    void pop();
    std::size_t size() const noexcept { return packets_.size(); }
    std::int64_t backlog_bytes() const noexcept { return backlog_; }
    void note_sent(int bytes) { backlog_ -= bytes; }

    /// Earliest time a rate demand produces its next packet.
    std::optional<SimTime> next_arrival(SimTime now) const;

    std::uint64_t dropped() const noexcept { return dropped_; }
    std::uint64_t generated() const noexcept { return next_seq_; }

private:
    int packet_bytes_;
    std::int64_t capacity_;
    Demand demand_;
    SimTime last_{};
    double carry_bits_ = 0.0;
    std::deque<Packet> packets_;
    std::int64_t backlog_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dropped_ = 0;
};

/// Receiver-side record of delivered units. Duplicates are rejected.
class DeliveryLog {
public:
    void sent(std::uint64_t key) { sent_.insert(key); }
    /// False (and nothing recorded) if `key` was already delivered.
    bool deliver(std::uint64_t key, int bytes, SimTime at);

    std::int64_t bytes_between(SimTime t0, SimTime t1) const;
    double kbps(SimTime t0, SimTime t1) const;

    std::size_t delivered_count() const noexcept { return received_.size(); }
    std::size_t sent_count() const noexcept { return sent_.size(); }
    std::uint64_t duplicates() const noexcept { return duplicates_; }
    const std::unordered_set<std::uint64_t>& sent_keys() const noexcept { return sent_; }
    const std::unordered_set<std::uint64_t>& received_keys() const noexcept { return received_; }

private:
    struct Entry {
        SimTime at;
        int bytes;
    };
    std::unordered_set<std::uint64_t> sent_;
    std::unordered_set<std::uint64_t> received_;
    std::vector<Entry> entries_;
    std::uint64_t duplicates_ = 0;
};

}  // namespace coexsim
