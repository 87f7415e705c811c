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

#include <coexsim/channel_power.hpp>
#include <coexsim/error.hpp>

#include <algorithm>
#include <fmt/format.h>
#include <set>

namespace coexsim {

double ChannelState::rssi(Protocol proto) const noexcept {
    return proto == Protocol::Ble ? coexsim::rssi(ble_txp_dbm, ble_attenuation_db)
                                  : coexsim::rssi(esb_txp_dbm, esb_attenuation_db);
}

double AnchorCurve::operator()(double x) const noexcept {
    if (anchors_.empty()) {
        return 0.0;
    }
    if (x <= anchors_.front().first) {
        return anchors_.front().second;
    }
    if (x >= anchors_.back().first) {
        return anchors_.back().second;
    }
    auto hi = std::upper_bound(anchors_.begin(), anchors_.end(), x,
                               [](double v, const std::pair<double, double>& a) { return v < a.first; });
    auto lo = std::prev(hi);
    const double f = (x - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

namespace {

const AnchorCurve kAckLoss{{-80.0, 0.22}, {-70.0, 0.07}, {-60.0, 0.01}, {-50.0, 0.0}};

// Forward corruption per attempt. Fitted once so the streaming throughput
// curves have their knee near -65 dBm and ESB 4M falls off first; frozen.
const AnchorCurve kBleCoded{{-100.0, 1.0}, {-97.0, 0.3}, {-92.0, 0.05}, {-88.0, 0.0}};
const AnchorCurve kBle1M{{-100.0, 1.0}, {-93.0, 0.5}, {-88.0, 0.2}, {-82.0, 0.05}, {-75.0, 0.0}};
const AnchorCurve kBle2M{{-100.0, 1.0}, {-90.0, 0.6}, {-85.0, 0.3}, {-80.0, 0.15}, {-75.0, 0.05}, {-65.0, 0.0}};
const AnchorCurve kEsb1M{{-100.0, 1.0}, {-92.0, 0.7}, {-87.0, 0.35}, {-82.0, 0.12}, {-75.0, 0.03}, {-65.0, 0.0}};
const AnchorCurve kEsb2M{{-100.0, 1.0}, {-90.0, 0.85}, {-85.0, 0.55}, {-80.0, 0.25}, {-75.0, 0.08}, {-65.0, 0.0}};
const AnchorCurve kEsb4M{{-95.0, 1.0}, {-85.0, 0.75}, {-80.0, 0.45}, {-75.0, 0.2}, {-70.0, 0.05}, {-65.0, 0.0}};

const AnchorCurve& forward_curve(Protocol proto, Phy phy) noexcept {
    if (proto == Protocol::Ble) {
        switch (phy) {
            case Phy::CodedS8: return kBleCoded;
            case Phy::Phy1M: return kBle1M;
            default: return kBle2M;
        }
    }
    switch (phy) {
        case Phy::Phy1M: return kEsb1M;
        case Phy::Phy2M: return kEsb2M;
        default: return kEsb4M;
    }
}

}  // namespace

double ack_loss_prob(double rssi_dbm) noexcept { return kAckLoss(rssi_dbm); }

double forward_loss_prob(double rssi_dbm, Protocol proto, Phy phy) noexcept {
    return forward_curve(proto, phy)(rssi_dbm);
}

double throughput_cap(double rssi_dbm, Protocol proto, Phy phy) noexcept {
    return 1.0 - forward_loss_prob(rssi_dbm, proto, phy);
}

double state_power_mw(const PowerParams& p, PowerState state) noexcept {
    switch (state) {
        case PowerState::Standby: return p.standby_mw - p.sleep_mw;
        case PowerState::BleOneShot: return p.ble_oneshot_extra;
        case PowerState::EsbOneShot: return p.esb_oneshot_extra;
        case PowerState::BleSetup: return p.ble_setup_extra;
        case PowerState::BleData: return p.ble_data_extra;
        case PowerState::BleLow: return p.ble_low_extra;
        case PowerState::EsbTx: return p.esb_tx_extra;
        case PowerState::BleInit: return p.ble_init_extra;
        case PowerState::BleAdvertising: return p.ble_adv_extra;
        case PowerState::BleDiscovery: return p.ble_discovery_extra;
        case PowerState::EsbInit: return p.esb_init_extra;
    }
    return 0.0;
}

double instantaneous_power(const PowerParams& params, std::span<const PowerState> active_states) noexcept {
    double total = params.sleep_mw;
    for (PowerState s : active_states) {
        total += state_power_mw(params, s);
    }
    return total;
}

PowerTrace::PowerTrace(SimTime start, SimTime end, std::vector<Step> steps)
    : start_(start), end_(end), steps_(std::move(steps)) {
    if (steps_.empty() || steps_.front().at != start_) {
        steps_.insert(steps_.begin(), Step{start_, 0});
    }
}

double PowerTrace::power_mw_at(SimTime t) const {
    if (t < start_ || t >= end_) {
        throw UncoveredInterval(fmt::format("t={} us outside trace [{}, {})", us_of(t), us_of(start_), us_of(end_)));
    }
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t, [](SimTime v, const Step& s) { return v < s.at; });
    return static_cast<double>(std::prev(it)->power_uw) / 1000.0;
}

std::int64_t PowerTrace::integrate_pj(SimTime t0, SimTime t1) const {
    if (t0 < start_ || t1 > end_ || t1 < t0) {
        throw UncoveredInterval(fmt::format("[{}, {}] us not covered by trace [{}, {}]", us_of(t0), us_of(t1),
                                            us_of(start_), us_of(end_)));
    }
    std::int64_t total = 0;
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t0, [](SimTime v, const Step& s) { return v < s.at; });
    --it;
    for (; it != steps_.end() && it->at < t1; ++it) {
        const SimTime a = std::max(it->at, t0);
        const SimTime b = std::next(it) == steps_.end() ? t1 : std::min(std::next(it)->at, t1);
        total += it->power_uw * us_of(b - a);
    }
    return total;
}

double PowerTrace::mean_power_mw(SimTime t0, SimTime t1) const {
    if (t1 <= t0) {
        throw UncoveredInterval("mean power needs a non-empty interval");
    }
    return static_cast<double>(integrate_pj(t0, t1)) / static_cast<double>(us_of(t1 - t0)) / 1000.0;
}

std::vector<std::pair<SimTime, double>> PowerTrace::samples(Micros period) const {
    std::vector<std::pair<SimTime, double>> out;
    auto it = steps_.begin();
    for (SimTime t = start_; t < end_; t += period) {
        while (std::next(it) != steps_.end() && std::next(it)->at <= t) {
            ++it;
        }
        out.emplace_back(t, static_cast<double>(it->power_uw) / 1000.0);
    }
    return out;
}

void PowerTrace::write_csv(std::ostream& out, Micros period) const {
    out << "time_us,power_mw\n";
    for (const auto& [t, mw] : samples(period)) {
        out << fmt::format("{},{:.3f}\n", us_of(t), mw);
    }
}

void PowerMeter::set_awake(SimTime t, bool awake) { awake_[us_of(t)] = awake; }

void PowerMeter::add(SimTime start, SimTime end, PowerState state) {
    add_mw(start, end, state_power_mw(params_, state));
}

void PowerMeter::add_mw(SimTime start, SimTime end, double extra_mw) {
    if (end <= start) {
        return;
    }
    const std::int64_t uw = to_uw(extra_mw);
    delta_uw_[us_of(start)] += uw;
    delta_uw_[us_of(end)] -= uw;
}

PowerTrace PowerMeter::trace(SimTime t0, SimTime t1) const {
    const std::int64_t sleep_uw = to_uw(params_.sleep_mw);
    const std::int64_t standby_uw = to_uw(params_.standby_mw);
    std::set<std::int64_t> points{us_of(t0)};
    for (const auto& [t, d] : delta_uw_) {
        if (t > us_of(t0) && t < us_of(t1)) {
            points.insert(t);
        }
    }
    for (const auto& [t, a] : awake_) {
        if (t > us_of(t0) && t < us_of(t1)) {
            points.insert(t);
        }
    }
    std::vector<PowerTrace::Step> steps;
    std::int64_t extra = 0;
    auto d = delta_uw_.begin();
    bool awake = false;
    auto a = awake_.begin();
    for (std::int64_t p : points) {
        for (; d != delta_uw_.end() && d->first <= p; ++d) {
            extra += d->second;
        }
        for (; a != awake_.end() && a->first <= p; ++a) {
            awake = a->second;
        }
        const std::int64_t level = (awake ? standby_uw : sleep_uw) + extra;
        if (steps.empty() || steps.back().power_uw != level) {
            steps.push_back({at_us(p), level});
        }
    }
    return PowerTrace(t0, t1, std::move(steps));
}

}  // namespace coexsim
