// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

#include "gfmud/constellation.hpp"

using namespace gfmud;

namespace {

// Independent direct evaluation of the sparse-symbol entropy.
double entropy_direct(double gamma, std::uint32_t k) {
    double h = 0.0;
    if (gamma < 1.0) h -= (1.0 - gamma) * std::log2(1.0 - gamma);
    if (gamma > 0.0) h -= gamma * std::log2(gamma / static_cast<double>(k));
    return h;
}

bool set_equal(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    for (const auto& x : a) {
        bool found = false;
        for (const auto& y : b)
            if (std::abs(x - y) < tol) found = true;
        if (!found) return false;
    }
    return true;
}

} // namespace

TEST_CASE("symbol entropy pinned values") {
    CHECK(symbol_entropy(1.0, 4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(symbol_entropy(0.5, 4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(symbol_entropy(0.25, 4) == doctest::Approx(1.31128).epsilon(1e-4));
    // 0.25 * 2 + h2(0.25)
    CHECK(symbol_entropy(0.25, 4) == doctest::Approx(1.3112781244591328).epsilon(1e-12));
}

TEST_CASE("symbol entropy matches direct evaluation") {
    for (double g : {1e-6, 0.01, 0.1, 0.2, 0.25, 0.5, 0.75, 0.99, 1.0})
        for (std::uint32_t k : {2u, 4u, 8u, 16u})
            CHECK(std::abs(symbol_entropy(g, k) - entropy_direct(g, k)) < 1e-9);
    CHECK(symbol_entropy(0.0, 4) == doctest::Approx(0.0));
}

TEST_CASE("symbol entropy domain errors") {
    CHECK_THROWS_AS(symbol_entropy(-0.1, 4), std::domain_error);
    CHECK_THROWS_AS(symbol_entropy(1.1, 4), std::domain_error);
}

TEST_CASE("scaling set of qpsk is the fourth roots of unity") {
    const auto cst = Constellation::qpsk();
    const std::vector<cplx> expect{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    CHECK(set_equal(cst.scaling, expect));
    CHECK(set_equal(scaling_set(cst.points), expect));
}

TEST_CASE("scaling set of bpsk and singleton") {
    CHECK(set_equal(Constellation::bpsk().scaling, {{1, 0}, {-1, 0}}));
    CHECK(set_equal(scaling_set({{1, 0}}), {{1, 0}}));
}

TEST_CASE("scaling set is a group under multiplication") {
    for (const auto& cst : {Constellation::qpsk(), Constellation::bpsk()}) {
        const auto& s = cst.scaling;
        for (const auto& a : s)
            for (const auto& b : s) {
                bool closed = false;
                for (const auto& c : s)
                    if (std::abs(a * b - c) < 1e-9) closed = true;
                CHECK(closed);
            }
    }
}

TEST_CASE("qpsk geometry and reference") {
    const auto cst = Constellation::qpsk();
    REQUIRE(cst.size() == 4);
    CHECK(cst.bits_per_symbol() == 2);
    const double c = std::sqrt(2.0) / 2.0;
    CHECK(std::abs(cst.reference() - cplx{c, c}) < 1e-12);
    for (const auto& p : cst.points) CHECK(std::abs(p) == doctest::Approx(1.0));
}

TEST_CASE("gray map is the documented bijection") {
    const auto cst = Constellation::qpsk();
    const double c = std::sqrt(2.0) / 2.0;
    // 00 -> (+,+), 01 -> (-,+), 11 -> (-,-), 10 -> (+,-)
    CHECK(std::abs(cst.points[cst.gray_index(0b00)] - cplx{c, c}) < 1e-12);
    CHECK(std::abs(cst.points[cst.gray_index(0b01)] - cplx{-c, c}) < 1e-12);
    CHECK(std::abs(cst.points[cst.gray_index(0b11)] - cplx{-c, -c}) < 1e-12);
    CHECK(std::abs(cst.points[cst.gray_index(0b10)] - cplx{c, -c}) < 1e-12);
    std::set<std::size_t> seen;
    for (std::uint32_t b = 0; b < 4; ++b) {
        const auto idx = cst.gray_index(b);
        CHECK(cst.gray_bits(idx) == b);
        seen.insert(idx);
    }
    CHECK(seen.size() == 4);
    // Bit groups differing in one bit map to adjacent points.
    for (std::uint32_t b = 0; b < 4; ++b)
        for (std::uint32_t bit = 0; bit < 2; ++bit) {
            const auto d = cst.points[cst.gray_index(b)] - cst.points[cst.gray_index(b ^ (1u << bit))];
            CHECK(std::abs(d) == doctest::Approx(std::sqrt(2.0)));
        }
}

TEST_CASE("nearest point and tie-breaking") {
    const auto cst = Constellation::qpsk();
    for (std::size_t i = 0; i < cst.size(); ++i) {
        CHECK(cst.nearest(cst.points[i]) == i);
        CHECK(cst.nearest(cst.points[i] * 1.3) == i);
        CHECK(cst.nearest(cst.points[i] * 0.2) == i);
    }
    // The origin is equidistant from all four points: lowest index wins.
    CHECK(cst.nearest(cplx{0, 0}) == 0);
}

TEST_CASE("constellation make validates") {
    CHECK_THROWS(Constellation::make({}, 0));
    CHECK_THROWS(Constellation::make({{1, 0}, {-1, 0}, {0, 1}}, 0)); // not a power of two
    CHECK_THROWS(Constellation::make({{1, 0}, {-1, 0}}, 5));         // reference out of range
    const auto c = Constellation::make({{1, 0}, {-1, 0}}, 1);
    CHECK(std::abs(c.reference() - cplx{-1, 0}) < 1e-12);
}
