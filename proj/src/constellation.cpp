// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace gfmud {

namespace {

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

bool maps_into(cplx a, const std::vector<cplx>& pts, double tol) {
    for (cplx p : pts) {
        bool hit = false;
        for (cplx q : pts) {
            if (near(a * p, q, tol)) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

} // namespace

std::vector<cplx> scaling_set(const std::vector<cplx>& points, double tol) {
    if (points.empty()) throw std::invalid_argument("scaling_set: empty alphabet");
    std::vector<cplx> out;
    // Candidates: ratios against a fixed anchor point. Any valid scaling must
    // send the anchor to some point, so this candidate set is exhaustive.
    const cplx anchor = points[0];
    if (std::abs(anchor) <= tol) throw std::invalid_argument("scaling_set: zero point");
    for (cplx p : points) {
        const cplx a = p / anchor;
        bool dup = false;
        for (cplx e : out)
            if (near(e, a, tol)) dup = true;
        if (dup) continue;
        if (maps_into(a, points, tol)) out.push_back(a);
    }
    // Put the identity first for readability.
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (near(out[i], cplx{1.0, 0.0}, tol)) {
            std::swap(out[0], out[i]);
            break;
        }
    }
    return out;
}

std::size_t Constellation::gray_index(std::uint32_t v) const {
    if (v >= points.size()) throw std::invalid_argument("gray_index: value out of range");
    return v ^ (v >> 1);
}

std::uint32_t Constellation::gray_bits(std::size_t idx) const {
    if (idx >= points.size()) throw std::invalid_argument("gray_bits: index out of range");
    std::uint32_t v = static_cast<std::uint32_t>(idx);
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
    return v;
}

std::size_t Constellation::nearest(cplx x) const {
    std::size_t best = 0;
    double bestd = std::norm(x - points[0]);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = std::norm(x - points[i]);
        if (d < bestd) {
            bestd = d;
            best = i;
        }
    }
    return best;
}

Constellation Constellation::make(std::vector<cplx> pts, std::size_t reference_index) {
    if (pts.empty()) throw std::invalid_argument("constellation: empty");
    if (reference_index >= pts.size())
        throw std::invalid_argument("constellation: bad reference index");
    std::size_t k = pts.size();
    unsigned bits = 0;
    while (k > 1) {
        if (k & 1) throw std::invalid_argument("constellation: size must be a power of two");
        k >>= 1;
        ++bits;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(pts[i]) <= 1e-12)
            throw std::invalid_argument("constellation: zero is not a valid point");
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i] - pts[j]) <= 1e-12)
                throw std::invalid_argument("constellation: duplicate points");
    }
    Constellation c;
    c.points = std::move(pts);
    c.reference_index = reference_index;
    c.bits_ = bits;
    c.scaling = scaling_set(c.points);
    return c;
}

Constellation Constellation::qpsk() {
    const double h = std::sqrt(2.0) / 2.0;
    return make({{h, h}, {-h, h}, {-h, -h}, {h, -h}}, 0);
}

Constellation Constellation::bpsk() { return make({{1.0, 0.0}, {-1.0, 0.0}}, 0); }

double symbol_entropy(double gamma, std::uint32_t alphabet_size) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::domain_error("symbol_entropy: gamma outside [0, 1]");
    if (alphabet_size == 0) throw std::invalid_argument("symbol_entropy: empty alphabet");
    double h = 0.0;
    if (gamma > 0.0) h -= gamma * std::log2(gamma / static_cast<double>(alphabet_size));
    if (gamma < 1.0) h -= (1.0 - gamma) * std::log2(1.0 - gamma);
    return h;
}

} // namespace gfmud
