// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/harness.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace gfmud {

std::uint64_t score_slot(const SlotScenario& scn, const std::vector<RecoveredPacket>& claims) {
    std::set<Bits> claimed;
    for (const auto& c : claims) claimed.insert(c.payload);
    std::uint64_t hits = 0;
    for (const auto& p : scn.packets)
        if (claimed.count(p.payload)) ++hits;
    return hits;
}

std::vector<std::uint8_t> coverable_packets(const StreamScenario& scn,
                                            const WindowSchedule& sched) {
    const auto starts = sched.starts(scn.duration);
    std::vector<std::uint8_t> cov(scn.packets.size(), 0);
    if (starts.empty()) return cov;
    const std::int64_t step = sched.step;
    const std::int64_t last = static_cast<std::int64_t>(starts.size()) - 1;
    const std::int64_t reach = static_cast<std::int64_t>(sched.window_len) - scn.packet_len;
    for (std::size_t i = 0; i < scn.packets.size(); ++i) {
        const std::int64_t s = scn.packets[i].start_time;
        if (s < 0) continue;
        // window k covers the packet iff k*step in [s - reach, s]
        const std::int64_t lo = s - reach;
        const std::int64_t kmin = lo <= 0 ? 0 : (lo + step - 1) / step;
        const std::int64_t kmax = std::min(s / step, last);
        cov[i] = kmin <= kmax ? 1 : 0;
    }
    return cov;
}

StreamScore score_stream(const StreamScenario& scn, const WindowSchedule& sched,
                         const std::vector<RecoveredPacket>& claims) {
    const auto cov = coverable_packets(scn, sched);
    std::set<std::pair<std::int64_t, Bits>> claimed;
    for (const auto& c : claims) claimed.emplace(c.start_time, c.payload);
    StreamScore sc;
    for (std::size_t i = 0; i < scn.packets.size(); ++i) {
        if (!cov[i]) continue;
        ++sc.sent;
        if (claimed.count({scn.packets[i].start_time, scn.packets[i].payload})) ++sc.recovered;
    }
    return sc;
}

} // namespace gfmud
