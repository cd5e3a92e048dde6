// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/codec.hpp"

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

namespace gfmud {

namespace {

constexpr double kZeroTol = 1e-9;  // |x| below this counts as a zero symbol
constexpr double kMatchTol = 1e-9; // distance for matching a hard symbol to a point

// Binomial coefficients C(n, k) for n <= nmax, k <= kmax, as big integers
// (C(255, 64) needs ~208 bits). Built once per codec configuration and cached
// per thread, so codec calls are safe for concurrent use.
struct PascalTable {
    std::uint32_t nmax, kmax;
    std::vector<mpz_class> c;

    PascalTable(std::uint32_t n, std::uint32_t k) : nmax(n), kmax(k), c((n + 1) * (k + 1)) {
        for (std::uint32_t i = 0; i <= n; ++i) {
            at(i, 0) = 1;
            for (std::uint32_t j = 1; j <= k; ++j) {
                if (j > i)
                    at(i, j) = 0;
                else if (j == i)
                    at(i, j) = 1;
                else
                    at(i, j) = at(i - 1, j - 1) + at(i - 1, j);
            }
        }
    }
    mpz_class& at(std::uint32_t n, std::uint32_t k) { return c[n * (kmax + 1) + k]; }
    const mpz_class& at(std::uint32_t n, std::uint32_t k) const { return c[n * (kmax + 1) + k]; }
};

const PascalTable& pascal(std::uint32_t nmax, std::uint32_t kmax) {
    thread_local std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<PascalTable>>
        cache;
    auto& slot = cache[{nmax, kmax}];
    if (!slot) slot = std::make_unique<PascalTable>(nmax, kmax);
    return *slot;
}

mpz_class bits_to_mpz(const Bits& bits, std::size_t begin, std::size_t count) {
    mpz_class r = 0;
    for (std::size_t i = 0; i < count; ++i) {
        r <<= 1;
        if (bits[begin + i]) r |= 1;
    }
    return r;
}

void mpz_to_bits(const mpz_class& v, std::size_t count, Bits& out) {
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(static_cast<std::uint8_t>(
            mpz_tstbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(count - 1 - i))));
}

// Colexicographic combinadic rank of an ascending support: sum_i C(p_i, i+1).
mpz_class support_rank(const std::vector<std::uint32_t>& pos, const PascalTable& t) {
    mpz_class r = 0;
    for (std::size_t i = 0; i < pos.size(); ++i)
        r += t.at(pos[i], static_cast<std::uint32_t>(i + 1));
    return r;
}

// Inverse: the unique ascending support with the given colex rank.
std::vector<std::uint32_t> support_unrank(mpz_class rank, std::uint32_t w, std::uint32_t max_pos,
                                          const PascalTable& t) {
    std::vector<std::uint32_t> pos(w);
    std::uint32_t cur = max_pos;
    for (std::uint32_t i = w; i >= 1; --i) {
        while (t.at(cur, i) > rank) --cur;
        pos[i - 1] = cur;
        rank -= t.at(cur, i);
        if (cur > 0) --cur;
    }
    return pos;
}

std::size_t floor_log2(const mpz_class& v) {
    // sizeinbase(v, 2) == floor(log2 v) + 1 for v >= 1
    return mpz_sizeinbase(v.get_mpz_t(), 2) - 1;
}

} // namespace

RslCodecConfig RslCodecConfig::make(std::uint32_t slot_len, double sparsity,
                                    std::uint32_t num_users) {
    if (slot_len < 2) throw std::invalid_argument("rsl codec: slot_len must be >= 2");
    if (!(sparsity > 0.0 && sparsity <= 1.0))
        throw std::invalid_argument("rsl codec: sparsity must be in (0, 1]");
    if (num_users == 0) throw std::invalid_argument("rsl codec: num_users must be >= 1");
    const auto w = static_cast<std::uint32_t>(std::llround(sparsity * (slot_len - 1)));
    if (w < 1 || w > slot_len - 1)
        throw std::invalid_argument("rsl codec: nonzero count out of range");
    return {slot_len, sparsity, num_users, w};
}

std::size_t support_index_bits(std::uint32_t slot_len, std::uint32_t nonzero_count) {
    const auto& t = pascal(slot_len - 1, nonzero_count);
    return floor_log2(t.at(slot_len - 1, nonzero_count));
}

std::size_t rsl_capacity_bits(const RslCodecConfig& cfg, const Constellation& cst) {
    return support_index_bits(cfg.slot_len, cfg.nonzero_count) +
           static_cast<std::size_t>(cfg.nonzero_count) * cst.bits_per_symbol();
}

std::size_t ssl_capacity_bits(std::uint32_t packet_len, const Constellation& cst) {
    if (packet_len < 2) throw std::invalid_argument("ssl codec: packet_len must be >= 2");
    return static_cast<std::size_t>(packet_len - 1) * cst.bits_per_symbol();
}

std::uint32_t id_bits(std::uint32_t num_users) {
    std::uint32_t b = 0;
    while ((std::uint64_t{1} << b) < num_users) ++b;
    return b;
}

std::vector<cplx> encode_rsl(const Bits& payload, const RslCodecConfig& cfg,
                             const Constellation& cst, Rng& rng) {
    const auto& t = pascal(cfg.slot_len - 1, cfg.nonzero_count);
    const std::size_t nsupp = support_index_bits(cfg.slot_len, cfg.nonzero_count);
    const unsigned bps = cst.bits_per_symbol();
    if (payload.size() != nsupp + std::size_t{cfg.nonzero_count} * bps)
        throw std::invalid_argument("encode_rsl: payload length != capacity");

    const mpz_class rank = bits_to_mpz(payload, 0, nsupp);
    const auto support = support_unrank(rank, cfg.nonzero_count, cfg.slot_len - 2, t);

    std::vector<cplx> coded(cfg.slot_len - 1, cplx{});
    std::size_t off = nsupp;
    for (std::uint32_t p : support) {
        std::uint32_t v = 0;
        for (unsigned b = 0; b < bps; ++b) v = (v << 1) | payload[off++];
        coded[p] = cst.points[cst.gray_index(v)];
    }

    const std::uint32_t tau = support[0];
    const auto u = static_cast<std::size_t>(rng.below(tau + 1));
    std::vector<cplx> slot;
    slot.reserve(cfg.slot_len);
    slot.insert(slot.end(), coded.begin(), coded.begin() + static_cast<std::ptrdiff_t>(u));
    slot.push_back(cst.reference());
    slot.insert(slot.end(), coded.begin() + static_cast<std::ptrdiff_t>(u), coded.end());
    return slot;
}

std::optional<Bits> decode_rsl(const std::vector<cplx>& symbols, const RslCodecConfig& cfg,
                               const Constellation& cst) {
    if (symbols.size() != cfg.slot_len) return std::nullopt;
    std::size_t first = symbols.size();
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (std::abs(symbols[i]) > kZeroTol) {
            first = i;
            break;
        }
    }
    if (first == symbols.size()) return std::nullopt;
    if (std::abs(symbols[first] - cst.reference()) > kMatchTol) return std::nullopt;

    std::vector<std::uint32_t> support;
    std::vector<std::size_t> values;
    for (std::size_t i = first + 1; i < symbols.size(); ++i) {
        const cplx x = symbols[i];
        if (std::abs(x) <= kZeroTol) continue;
        const std::size_t j = cst.nearest(x);
        if (std::abs(x - cst.points[j]) > kMatchTol) return std::nullopt;
        support.push_back(static_cast<std::uint32_t>(i - 1));
        values.push_back(j);
    }
    if (support.size() != cfg.nonzero_count) return std::nullopt;

    const auto& t = pascal(cfg.slot_len - 1, cfg.nonzero_count);
    const std::size_t nsupp = support_index_bits(cfg.slot_len, cfg.nonzero_count);
    const mpz_class rank = support_rank(support, t);
    mpz_class limit = 1;
    limit <<= nsupp;
    if (rank >= limit) return std::nullopt;

    Bits out;
    out.reserve(nsupp + values.size() * cst.bits_per_symbol());
    mpz_to_bits(rank, nsupp, out);
    for (std::size_t v : values) {
        const std::uint32_t g = cst.gray_bits(v);
        for (unsigned b = cst.bits_per_symbol(); b-- > 0;)
            out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
    }
    return out;
}

std::vector<cplx> encode_ssl(const Bits& payload, std::uint32_t packet_len,
                             const Constellation& cst) {
    const unsigned bps = cst.bits_per_symbol();
    if (payload.size() != std::size_t{packet_len - 1} * bps)
        throw std::invalid_argument("encode_ssl: payload length != capacity");
    std::vector<cplx> pkt;
    pkt.reserve(packet_len);
    pkt.push_back(cst.reference());
    std::size_t off = 0;
    for (std::uint32_t s = 1; s < packet_len; ++s) {
        std::uint32_t v = 0;
        for (unsigned b = 0; b < bps; ++b) v = (v << 1) | payload[off++];
        pkt.push_back(cst.points[cst.gray_index(v)]);
    }
    return pkt;
}

std::optional<Bits> decode_ssl(const std::vector<cplx>& symbols, const Constellation& cst) {
    if (symbols.size() < 2) return std::nullopt;
    if (std::abs(symbols[0] - cst.reference()) > kMatchTol) return std::nullopt;
    Bits out;
    out.reserve((symbols.size() - 1) * cst.bits_per_symbol());
    for (std::size_t i = 1; i < symbols.size(); ++i) {
        const std::size_t j = cst.nearest(symbols[i]);
        if (std::abs(symbols[i] - cst.points[j]) > kMatchTol) return std::nullopt;
        const std::uint32_t g = cst.gray_bits(j);
        for (unsigned b = cst.bits_per_symbol(); b-- > 0;)
            out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
    }
    return out;
}

std::optional<std::uint32_t> user_id_from_payload(const Bits& payload, std::uint32_t num_users) {
    const std::uint32_t nb = id_bits(num_users);
    if (payload.size() < nb) return std::nullopt;
    std::uint32_t v = 0;
    for (std::uint32_t i = 0; i < nb; ++i) v = (v << 1) | payload[i];
    if (v >= num_users) return std::nullopt;
    return v;
}

Bits random_payload(std::uint32_t user_id, std::size_t total_bits, std::uint32_t num_users,
                    Rng& rng) {
    const std::uint32_t nb = id_bits(num_users);
    if (user_id >= num_users) throw std::invalid_argument("random_payload: bad user id");
    if (total_bits < nb) throw std::invalid_argument("random_payload: payload shorter than id");
    Bits out;
    out.reserve(total_bits);
    for (std::uint32_t i = nb; i-- > 0;)
        out.push_back(static_cast<std::uint8_t>((user_id >> i) & 1u));
    for (std::size_t i = nb; i < total_bits; ++i)
        out.push_back(static_cast<std::uint8_t>(rng.u64() & 1u));
    return out;
}

} // namespace gfmud
