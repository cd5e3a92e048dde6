// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gfmud/bigamp.hpp"
#include "gfmud/codec.hpp"

namespace gfmud {

// One recovered packet claim.
struct RecoveredPacket {
    std::optional<std::uint32_t> user_id; // nullopt: id field out of range
    Bits payload;
    std::size_t row = 0;          // estimate row it came from
    std::uint32_t trial = 0;      // engine trial that produced it
    std::int64_t start_time = -1; // absolute start (unslotted scheme only)
    std::uint32_t window = 0;     // window index (unslotted scheme only)
};

struct RslDetectorConfig {
    std::uint32_t num_active = 0;  // N given to the factorization
    double sparsity = 0.0;         // codebook gamma, drives the prior
    double zero_threshold = 0.5;   // |mean| below this is squashed to zero
    std::uint32_t restarts = 25;   // independently initialized runs R
    EntryPriorH prior_h;           // channel prior (variance beta_bar)
    BigAmpOptions bigamp;          // trials is overridden by `restarts`
};

// Zero out sub-threshold entries of the posterior mean grid.
CMat soft_threshold(const SplitMat& x_mean, double eps);

// Rotate a row so its first nonzero becomes the reference point: multiplies
// by x0 / row[tau]. nullopt when the row has no nonzero entry.
std::optional<std::vector<cplx>> phase_correct(const std::vector<cplx>& row, cplx x0);

// Nearest point in {0} union X: zero stays zero, anything else maps to the
// closest constellation point (ties to the lowest point index).
cplx hard_decide(cplx x, const Constellation& cst);

// Full slot detection: run the blind factorization R times, and for every
// trial decode every estimate row (threshold, phase-correct, hard-decide,
// decode). Recovered packets are deduplicated by payload across rows and
// trials (first occurrence kept).
std::vector<RecoveredPacket> detect_slot(const CMat& y, double sigma2,
                                         const RslDetectorConfig& det,
                                         const RslCodecConfig& codec, const Constellation& cst);

} // namespace gfmud
