// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gfmud/airsim.hpp"
#include "gfmud/rsl.hpp"
#include "gfmud/turbo.hpp"

namespace gfmud {

// Sliding-window grid: starts 0, step, 2*step, ... while start + len fits.
struct WindowSchedule {
    std::uint32_t window_len = 0; // Tp
    std::uint32_t step = 0;

    // Tp >= L and 1 <= step <= Tp - L + 1, so every packet that starts at or
    // after 0 and ends by the last window's end is fully inside some window.
    void validate(std::uint32_t packet_len) const;
    std::vector<std::int64_t> starts(std::int64_t duration) const;
};

struct PositionedRow {
    std::size_t row = 0;
    std::int64_t offset = 0; // estimated start relative to the window
    double mass = 0.0;       // posterior mass of that offset
    bool is_type1 = false;   // fully inside: 0 <= offset <= Tp - L
};

// Estimate each row's packet offset from the full-product posterior over
// offsets (built from 1 - zero_mass per entry). Ties resolve to the smallest
// offset.
std::vector<PositionedRow> position_rows(const RMat& x_zero, std::uint32_t packet_len);

// Decode rows positioned fully inside the window: the packet span is
// normalized by its first symbol (removing the scaling ambiguity), remaining
// symbols hard-decide over the constellation, then decode. Rows whose first
// span symbol has magnitude below norm_floor are dropped. start_time is
// window_start + offset.
std::vector<RecoveredPacket> recover_type1(const SplitMat& x_mean,
                                           const std::vector<PositionedRow>& positioned,
                                           std::uint32_t packet_len, const Constellation& cst,
                                           std::int64_t window_start, std::uint32_t window_index,
                                           double norm_floor = 1e-9);

// Per-window detector: maps a window (plus its index) to packet claims.
using WindowDetector =
    std::function<std::vector<RecoveredPacket>(const WindowView&, std::uint32_t)>;

// Shared sliding-detection driver: walks the schedule, skips windows with no
// overlapping packet (oracle count), runs `detect`, then deduplicates claims
// across windows. Identical (payload, start) claims keep the copy from the
// window where the packet is most interior (largest distance to the window
// edges); claims sharing (user id, start) but disagreeing in payload resolve
// the same way. Distinct users sharing a start are independent packets and
// both survive. Output is sorted by (start, payload).
std::vector<RecoveredPacket> sliding_detect_with(const StreamScenario& scn,
                                                 const WindowSchedule& sched,
                                                 std::uint32_t num_users,
                                                 const WindowDetector& detect,
                                                 std::ostream* window_log = nullptr);

struct SslDetectorOptions {
    TurboOptions turbo;
    BigAmpOptions bigamp;          // seed is re-derived per window
    EntryPriorH prior_h;
    std::uint32_t num_users = 200; // id field range for dedup
    std::uint32_t extra_rows = 0;  // estimate rows beyond the oracle count
    std::ostream* window_log = nullptr; // JSONL diagnostics, one line per window
};

// Blind non-time-slotted detection over the whole stream.
std::vector<RecoveredPacket> sliding_detect(const StreamScenario& scn,
                                            const WindowSchedule& sched,
                                            const Constellation& cst,
                                            const SslDetectorOptions& opts);

} // namespace gfmud
