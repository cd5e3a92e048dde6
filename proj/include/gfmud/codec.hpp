// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gfmud/constellation.hpp"
#include "gfmud/rng.hpp"

namespace gfmud {

// Payload bits, one per element, MSB-first within every field.
using Bits = std::vector<std::uint8_t>;

// Fixed-composition codebook for the time-slotted scheme: a slot of T symbols
// carries exactly w nonzero constellation points, the first of which is the
// reference point x0. The support of the remaining T-1 positions is chosen by
// an enumerative (combinadic) index, each nonzero value by Gray-mapped bits.
struct RslCodecConfig {
    std::uint32_t slot_len = 0;      // T
    double sparsity = 0.0;           // gamma
    std::uint32_t num_users = 0;     // U
    std::uint32_t nonzero_count = 0; // w = round(gamma * (T-1))

    // Computes w and validates: T >= 2, gamma in (0, 1], 1 <= w <= T-1.
    static RslCodecConfig make(std::uint32_t slot_len, double sparsity, std::uint32_t num_users);
};

// floor(log2 C(T-1, w)): payload bits carried by the support choice.
std::size_t support_index_bits(std::uint32_t slot_len, std::uint32_t nonzero_count);

// Total payload bits per slot: support_index_bits + w * log2|X|.
std::size_t rsl_capacity_bits(const RslCodecConfig& cfg, const Constellation& cst);

// Payload bits per non-time-slotted packet of L symbols: (L-1) * log2|X|.
std::size_t ssl_capacity_bits(std::uint32_t packet_len, const Constellation& cst);

// Bits reserved at the front of every payload for the user id: ceil(log2 U).
std::uint32_t id_bits(std::uint32_t num_users);

// Slot codeword of length T. The support index consumes the first
// support_index_bits of the payload, value bits follow in support order. The
// reference x0 is inserted at a uniformly random position in [0, tau], tau
// being the first nonzero position of the T-1 coded symbols, so x0 is always
// the first nonzero of the slot. Throws std::invalid_argument on a payload of
// the wrong length.
std::vector<cplx> encode_rsl(const Bits& payload, const RslCodecConfig& cfg,
                             const Constellation& cst, Rng& rng);

// Inverse of encode_rsl on hard-decided symbols (exact points or zero).
// Returns nullopt when the input is not a codeword: empty slot, first nonzero
// not x0, wrong weight, non-point values, or a support index out of range.
std::optional<Bits> decode_rsl(const std::vector<cplx>& symbols, const RslCodecConfig& cfg,
                               const Constellation& cst);

// Packet codeword of length L: x0 followed by L-1 Gray-mapped points.
std::vector<cplx> encode_ssl(const Bits& payload, std::uint32_t packet_len,
                             const Constellation& cst);
std::optional<Bits> decode_ssl(const std::vector<cplx>& symbols, const Constellation& cst);

// A transmitted packet, as ground truth for scoring.
struct PacketRecord {
    std::uint32_t user_id = 0; // 0-based
    Bits payload;
    std::vector<cplx> symbols;
    std::int64_t start_time = -1; // absolute symbol index; -1 for slotted traffic
};

// Reads the user id field; nullopt when the decoded value is >= num_users.
std::optional<std::uint32_t> user_id_from_payload(const Bits& payload, std::uint32_t num_users);

// user id field + uniformly random data bits, total_bits long.
Bits random_payload(std::uint32_t user_id, std::size_t total_bits, std::uint32_t num_users,
                    Rng& rng);

} // namespace gfmud
