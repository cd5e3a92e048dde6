// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gfmud/codec.hpp"
#include "gfmud/rng.hpp"

using namespace gfmud;

namespace {

// Independent binomial oracle, 64-bit Pascal triangle (n <= 60 stays exact).
std::uint64_t binom(unsigned n, unsigned k) {
    if (k > n) return 0;
    std::vector<std::uint64_t> row(n + 1, 0);
    row[0] = 1;
    for (unsigned i = 1; i <= n; ++i)
        for (unsigned j = std::min(i, k); j > 0; --j) row[j] += row[j - 1];
    return row[k];
}

std::size_t floor_log2(std::uint64_t v) {
    std::size_t b = 0;
    while (v >>= 1) ++b;
    return b;
}

Bits random_bits(std::size_t n, Rng& rng) {
    Bits b(n);
    for (auto& x : b) x = rng.bernoulli(0.5) ? 1 : 0;
    return b;
}

std::size_t count_nonzero(const std::vector<cplx>& v) {
    std::size_t n = 0;
    for (const auto& x : v)
        if (std::abs(x) > 1e-12) ++n;
    return n;
}

} // namespace

TEST_CASE("config derives the nonzero count") {
    const auto c = RslCodecConfig::make(128, 0.25, 200);
    CHECK(c.nonzero_count == 32); // round(0.25 * 127)
    CHECK(RslCodecConfig::make(64, 0.25, 200).nonzero_count == 16);
    CHECK(RslCodecConfig::make(5, 0.5, 8).nonzero_count == 2);
    CHECK_THROWS(RslCodecConfig::make(1, 0.25, 8));
    CHECK_THROWS(RslCodecConfig::make(64, 0.0, 8));
    CHECK_THROWS(RslCodecConfig::make(64, 1.5, 8));
}

TEST_CASE("support index bits match the independent binomial oracle") {
    for (unsigned t = 2; t <= 40; ++t)
        for (unsigned w = 1; w < t && w <= 12; ++w)
            CHECK(support_index_bits(t, w) == floor_log2(binom(t - 1, w)));
    // Beyond 64-bit range: frozen independent evaluations.
    CHECK(support_index_bits(128, 32) == 99); // floor(log2 C(127, 32))
    CHECK(support_index_bits(64, 16) == 48);  // floor(log2 C(63, 16))
}

TEST_CASE("capacity formulas") {
    const auto cst = Constellation::qpsk();
    const auto c128 = RslCodecConfig::make(128, 0.25, 200);
    CHECK(rsl_capacity_bits(c128, cst) == 99 + 32 * 2);
    const auto c64 = RslCodecConfig::make(64, 0.25, 200);
    CHECK(rsl_capacity_bits(c64, cst) == 48 + 16 * 2);
    CHECK(ssl_capacity_bits(64, cst) == 126); // (L-1) * 2
    CHECK(ssl_capacity_bits(32, cst) == 62);
    CHECK(id_bits(200) == 8);
    CHECK(id_bits(2) == 1);
    CHECK(id_bits(256) == 8);
    CHECK(id_bits(257) == 9);
}

TEST_CASE("rsl encode: structure invariants and round trips") {
    const auto cst = Constellation::qpsk();
    Rng rng(41);
    for (const auto& [t, g] : std::vector<std::pair<std::uint32_t, double>>{
             {128, 0.25}, {64, 0.25}, {16, 0.5}, {9, 0.3}}) {
        const auto cfg = RslCodecConfig::make(t, g, 200);
        const std::size_t cap = rsl_capacity_bits(cfg, cst);
        double nz_total = 0.0;
        const int reps = 500;
        for (int i = 0; i < reps; ++i) {
            const auto bits = random_bits(cap, rng);
            const auto sym = encode_rsl(bits, cfg, cst, rng);
            REQUIRE(sym.size() == t);
            CHECK(count_nonzero(sym) == cfg.nonzero_count + 1);
            // First nonzero is the reference.
            for (const auto& x : sym) {
                if (std::abs(x) > 1e-12) {
                    CHECK(std::abs(x - cst.reference()) < 1e-12);
                    break;
                }
            }
            const auto back = decode_rsl(sym, cfg, cst);
            REQUIRE(back.has_value());
            CHECK(*back == bits);
            nz_total += static_cast<double>(count_nonzero(sym)) / t;
        }
        const double frac = nz_total / reps;
        CHECK(frac > static_cast<double>(cfg.nonzero_count) / t);
        CHECK(frac <= static_cast<double>(cfg.nonzero_count + 1) / t + 1e-12);
    }
}

TEST_CASE("rsl encode rejects wrong payload length") {
    const auto cst = Constellation::qpsk();
    const auto cfg = RslCodecConfig::make(16, 0.25, 8);
    Rng rng(3);
    CHECK_THROWS(encode_rsl(Bits(3), cfg, cst, rng));
}

TEST_CASE("combinadic index 0 at T=5, w=2 is the lowest support") {
    const auto cst = Constellation::qpsk();
    const auto cfg = RslCodecConfig::make(5, 0.5, 2);
    REQUIRE(cfg.nonzero_count == 2);
    const std::size_t cap = rsl_capacity_bits(cfg, cst);
    REQUIRE(cap == 2 + 4); // floor(log2 C(4,2)) = 2, plus 2 symbols
    const Bits bits(cap, 0); // support index 0, both symbols Gray 00
    Rng rng(5);
    const auto sym = encode_rsl(bits, cfg, cst, rng);
    // Colexicographic index 0 selects positions {0, 1} of the 4 coded
    // symbols; the first coded symbol is nonzero, so the reference can only
    // go in front: (x0, s00, s00, 0, 0).
    const auto s00 = cst.points[cst.gray_index(0)];
    REQUIRE(sym.size() == 5);
    CHECK(std::abs(sym[0] - cst.reference()) < 1e-12);
    CHECK(std::abs(sym[1] - s00) < 1e-12);
    CHECK(std::abs(sym[2] - s00) < 1e-12);
    CHECK(std::abs(sym[3]) < 1e-12);
    CHECK(std::abs(sym[4]) < 1e-12);
}

TEST_CASE("exhaustive bijectivity at T=7, w=2") {
    const auto cst = Constellation::qpsk();
    const auto cfg = RslCodecConfig::make(7, 1.0 / 3.0, 4);
    REQUIRE(cfg.nonzero_count == 2);
    const std::size_t cap = rsl_capacity_bits(cfg, cst);
    Rng rng(7);
    std::set<std::vector<std::pair<int, int>>> images;
    for (std::uint64_t v = 0; v < (1ull << cap); ++v) {
        Bits bits(cap);
        for (std::size_t i = 0; i < cap; ++i) bits[i] = (v >> (cap - 1 - i)) & 1;
        const auto sym = encode_rsl(bits, cfg, cst, rng);
        // Image key: support positions and point indices after stripping the
        // reference, i.e. the pre-insertion codeword.
        std::vector<std::pair<int, int>> key;
        bool seen_ref = false;
        for (std::size_t p = 0; p < sym.size(); ++p) {
            if (std::abs(sym[p]) < 1e-12) continue;
            if (!seen_ref) {
                seen_ref = true;
                continue;
            }
            key.push_back({static_cast<int>(p), static_cast<int>(cst.nearest(sym[p]))});
        }
        CHECK(images.insert(key).second); // injective before insertion
        const auto back = decode_rsl(sym, cfg, cst);
        REQUIRE(back.has_value());
        CHECK(*back == bits);
    }
    CHECK(images.size() == (1ull << cap));
}

TEST_CASE("rsl decode failures") {
    const auto cst = Constellation::qpsk();
    const auto cfg = RslCodecConfig::make(5, 0.5, 2);
    const std::size_t cap = rsl_capacity_bits(cfg, cst);
    Rng rng(11);
    CHECK_FALSE(decode_rsl(std::vector<cplx>(5, cplx{}), cfg, cst).has_value());

    const auto bits = random_bits(cap, rng);
    auto sym = encode_rsl(bits, cfg, cst, rng);
    // First nonzero not x0.
    for (auto& x : sym)
        if (std::abs(x) > 1e-12) {
            x = cst.points[(cst.reference_index + 1) % 4];
            break;
        }
    CHECK_FALSE(decode_rsl(sym, cfg, cst).has_value());

    // Exhaustive single-position corruption: move one data nonzero elsewhere.
    // The reference symbol is exempt: its position among the leading zeros
    // is decoder-invisible by design, so moving it there re-encodes the same
    // payload.
    for (int rep = 0; rep < 20; ++rep) {
        const auto b = random_bits(cap, rng);
        const auto good = encode_rsl(b, cfg, cst, rng);
        bool before_ref = true;
        for (std::size_t from = 0; from < good.size(); ++from) {
            if (std::abs(good[from]) < 1e-12) continue;
            if (before_ref) {
                before_ref = false; // skip the reference itself
                continue;
            }
            for (std::size_t to = 0; to < good.size(); ++to) {
                if (std::abs(good[to]) > 1e-12) continue;
                auto bad = good;
                std::swap(bad[from], bad[to]);
                const auto dec = decode_rsl(bad, cfg, cst);
                if (dec.has_value()) CHECK(*dec != b);
            }
        }
        // Wrong weight: drop one nonzero.
        auto light = good;
        for (auto it = light.rbegin(); it != light.rend(); ++it)
            if (std::abs(*it) > 1e-12) {
                *it = 0;
                break;
            }
        CHECK_FALSE(decode_rsl(light, cfg, cst).has_value());
    }
}

TEST_CASE("ssl encode and decode") {
    const auto cst = Constellation::qpsk();
    Rng rng(13);
    for (std::uint32_t l : {2u, 8u, 32u}) {
        const std::size_t cap = ssl_capacity_bits(l, cst);
        for (int i = 0; i < 300; ++i) {
            const auto bits = random_bits(cap, rng);
            const auto sym = encode_ssl(bits, l, cst);
            REQUIRE(sym.size() == l);
            CHECK(std::abs(sym[0] - cst.reference()) < 1e-12);
            for (const auto& x : sym) CHECK(std::abs(x) == doctest::Approx(1.0));
            const auto back = decode_ssl(sym, cst);
            REQUIRE(back.has_value());
            CHECK(*back == bits);
        }
    }
    // L=2, bits 00 -> (x0, s00).
    const auto sym = encode_ssl(Bits{0, 0}, 2, cst);
    CHECK(std::abs(sym[0] - cst.reference()) < 1e-12);
    CHECK(std::abs(sym[1] - cst.points[cst.gray_index(0)]) < 1e-12);
    // Head must be the reference.
    auto bad = sym;
    bad[0] = cst.points[(cst.reference_index + 1) % 4];
    CHECK_FALSE(decode_ssl(bad, cst).has_value());
    CHECK_THROWS(encode_ssl(Bits(3), 2, cst));
}

TEST_CASE("payload id field") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto uid = static_cast<std::uint32_t>(rng.below(200));
        const auto p = random_payload(uid, 62, 200, rng);
        REQUIRE(p.size() == 62);
        const auto back = user_id_from_payload(p, 200);
        REQUIRE(back.has_value());
        CHECK(*back == uid);
    }
    // An id value beyond U decodes to nullopt.
    Bits p(62, 1); // leading 8 bits = 255 >= 200
    CHECK_FALSE(user_id_from_payload(p, 200).has_value());
}
