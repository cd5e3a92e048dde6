// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <vector>

#include "gfmud/mat.hpp"

namespace gfmud {

// Set of scaling factors a (|a| = 1 among them a = 1) such that a*X == X as a
// set, within tolerance. Blind detection can only identify a transmitted
// codeword up to one of these factors.
std::vector<cplx> scaling_set(const std::vector<cplx>& points, double tol = 1e-9);

// Finite modulation alphabet (zero excluded) with a distinguished reference
// point x0 and a Gray bit mapping. Power-of-two sizes only.
struct Constellation {
    std::vector<cplx> points;
    std::size_t reference_index = 0;
    std::vector<cplx> scaling; // scaling ambiguity set of `points`

    cplx reference() const { return points[reference_index]; }
    std::size_t size() const { return points.size(); }
    unsigned bits_per_symbol() const { return bits_; }

    // Gray map: bit group value (MSB-first) -> point index, and inverse.
    std::size_t gray_index(std::uint32_t bits_value) const;
    std::uint32_t gray_bits(std::size_t point_index) const;

    // Nearest point by Euclidean distance; ties resolve to the lowest index.
    std::size_t nearest(cplx x) const;

    // Unit-energy QPSK, points (+,+), (-,+), (-,-), (+,-) scaled by sqrt(2)/2,
    // reference x0 = (+,+).
    static Constellation qpsk();
    static Constellation bpsk();
    // Validates invariants and computes the scaling set.
    static Constellation make(std::vector<cplx> pts, std::size_t reference_index);

  private:
    unsigned bits_ = 0;
};

// Entropy in bits of the sparse symbol prior: zero with probability 1-gamma,
// uniform over an alphabet of `alphabet_size` points with probability gamma.
// Throws std::domain_error outside gamma in [0, 1].
double symbol_entropy(double gamma, std::uint32_t alphabet_size);

} // namespace gfmud
