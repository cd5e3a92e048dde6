// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <vector>

#include "gfmud/ssl.hpp"

namespace gfmud {

// Genie knowledge for the oracle baseline: true effective channels and the
// true per-entry activity mask.
struct OracleSideInfo {
    CMat channels;                      // M x N
    std::vector<std::uint8_t> support;  // N x T row-major, nonzero = active
    std::size_t rows = 0, cols = 0;     // N, T

    bool active(std::size_t n, std::size_t t) const { return support[n * cols + t] != 0; }
    static OracleSideInfo from_window(const WindowView& w);
};

struct LmmseResult {
    CMat soft; // N x T, zero on inactive entries
    CMat hard; // soft with active entries decided to the nearest point
    bool used_pseudo_inverse = false;
};

// Column-wise oracle LMMSE:
//   xhat_{S_t} = P H_{S_t}^H (H_{S_t} P H_{S_t}^H + sigma2 I)^{-1} y_t
// with S_t the active rows of column t; inactive entries stay zero. A
// rank-deficient normal matrix (possible when sigma2 == 0) falls back to a
// pseudo-inverse solve and sets used_pseudo_inverse.
LmmseResult oracle_lmmse(const CMat& y, const OracleSideInfo& side, double sigma2, double power,
                         const Constellation& cst);

// Window claims from the oracle LMMSE estimate: fully-contained packets are
// read off at their true offsets and decoded.
std::vector<RecoveredPacket> lmmse_window_detect(const WindowView& w, std::uint32_t packet_len,
                                                 double sigma2, double power,
                                                 const Constellation& cst,
                                                 std::uint32_t window_index);

// Known-channel GAMP baseline: the engine runs with H clamped to the true
// window channels and the iid gamma' prior (no offset subgraph). Entries are
// hard-decided and a row claims a packet only when its nonzero decisions
// form exactly one full-length run; the scheme never sees row structure.
std::vector<RecoveredPacket> csi_gamp_window_detect(const WindowView& w, std::uint32_t packet_len,
                                                    double sigma2, const Constellation& cst,
                                                    const BigAmpOptions& opts,
                                                    std::uint32_t window_index);

// Full-stream drivers sharing the sliding schedule, window skipping and
// dedup rules with the blind detector, so PER comparisons are like for like.
std::vector<RecoveredPacket> sliding_detect_lmmse(const StreamScenario& scn,
                                                  const WindowSchedule& sched,
                                                  const Constellation& cst,
                                                  std::uint32_t num_users, double power);
std::vector<RecoveredPacket> sliding_detect_csi_gamp(const StreamScenario& scn,
                                                     const WindowSchedule& sched,
                                                     const Constellation& cst,
                                                     std::uint32_t num_users,
                                                     const BigAmpOptions& opts);

} // namespace gfmud
