// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gfmud/bigamp.hpp"

namespace gfmud {

// Activity message for one signal entry: probability it carries a symbol.
struct IndicatorMessage {
    double p1 = 0.0;
};

// Discrete posterior of a row's packet offset dt in [-L+1, Tp-1]: the packet
// occupies window symbols [dt, dt+L) clipped to [0, Tp).
struct OffsetPosterior {
    std::int64_t min_offset = 0;
    std::vector<double> probs; // probs[i] is mass of offset min_offset + i
    bool degenerate = false;   // every offset had zero mass; probs are uniform
    std::int64_t argmax() const; // ties resolve to the smallest offset
};

// Activity rate of one window entry when exactly one packet of length L sits
// at a uniformly random offset in [-L+1, Tp-1]:
//   (2*Tp + L - 1) * L / (2 * (L + Tp - 1) * Tp)
double gamma_prime(std::uint32_t window_len, std::uint32_t packet_len);

// Offset posterior from per-symbol activity messages. Each offset's mass is
// the product of p1 inside its span and (1 - p1) outside; `exclude` drops one
// symbol's factor (leave-one-out, for extrinsic messages). Runs in
// O(Tp + L) per call via log-domain prefix sums; exact zeros are tracked by
// count so certain messages stay exact.
OffsetPosterior offset_distribution(const std::vector<IndicatorMessage>& in,
                                    std::uint32_t packet_len,
                                    std::optional<std::size_t> exclude = std::nullopt);

// Extrinsic activity message to every symbol t: the probability, under the
// leave-one-out offset posterior, that t falls inside the packet span.
std::vector<IndicatorMessage> sparsity_messages(const std::vector<IndicatorMessage>& in,
                                                std::uint32_t packet_len);

// Posterior -> activity message (1 - zero mass, clamped to [0, 1]).
IndicatorMessage x_to_d(const MarginalPosterior& post);

// Activity message merged with the original iid prior:
//   zero mass ∝ (1 - p1) * base.zero_mass
//   atom k    ∝ (p1 / K) * base.masses[k]
// When the product is identically zero the base prior is returned with the
// degenerate flag set.
std::pair<EntryPriorX, bool> d_to_x_prior(const IndicatorMessage& msg, const EntryPriorX& base);

struct TurboOptions {
    std::uint32_t outer_rounds = 20; // sparsity passes (K_max)
    std::uint32_t trials = 1;        // independently initialized runs (J_max)
    double tol = 1e-4;               // round-level relative change threshold on x
    bool early_exit = true;          // stop once every row's offset is confident
    double early_exit_mass = 0.999;
};

// Turbo detection on one window: BiG-AMP with the iid gamma' prior,
// interleaved with the packet-offset subgraph. Each round runs up to
// bopts.max_iters engine iterations, then refreshes every entry's prior from
// the leave-one-out offset messages. Engine state persists across rounds.
// Returns the best-residual trial.
BigAmpResult run_turbo(const CMat& y, std::size_t n, std::uint32_t packet_len,
                       EntryPriorH prior_h, double sigma2, const Constellation& cst,
                       const TurboOptions& topts, const BigAmpOptions& bopts);

} // namespace gfmud
