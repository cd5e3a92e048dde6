// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/airsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gfmud {

namespace {

// Single accumulation routine shared by slot synthesis, stream synthesis and
// window reconstruction, so that an extracted window is bit-identical to the
// sum of its parts (same operations in the same order).
void accumulate_rank_one(CMat& acc, const CMat& channels, std::size_t ch_col, const cplx* x,
                         std::size_t len, std::size_t col0) {
    for (std::size_t m = 0; m < acc.rows; ++m) {
        const cplx h = channels(m, ch_col);
        cplx* row = &acc(m, col0);
        for (std::size_t j = 0; j < len; ++j) row[j] += h * x[j];
    }
}

CMat draw_noise(std::size_t rows, std::size_t cols, double sigma2, Rng& rng) {
    CMat w(rows, cols);
    if (sigma2 > 0.0) {
        for (auto& z : w.v) z = rng.cgaussian(sigma2);
    }
    return w;
}

} // namespace

std::vector<cplx> draw_channel(std::uint32_t num_antennas, double beta, Rng& rng) {
    std::vector<cplx> h(num_antennas);
    for (auto& z : h) z = rng.cgaussian(beta);
    return h;
}

CMat synth_slot(const CMat& channels, const CMat& signals, const CMat& noise) {
    if (channels.rows != noise.rows || signals.cols != noise.cols ||
        channels.cols != signals.rows)
        throw std::invalid_argument("synth_slot: shape mismatch");
    CMat y = noise;
    for (std::size_t n = 0; n < channels.cols; ++n)
        accumulate_rank_one(y, channels, n, &signals(n, 0), signals.cols, 0);
    return y;
}

SlotScenario make_slot_scenario(const SystemConfig& sys, const RslCodecConfig& cfg,
                                const Constellation& cst, std::uint32_t num_active, double sigma2,
                                std::uint64_t seed) {
    if (num_active == 0 || num_active > sys.num_users)
        throw std::invalid_argument("make_slot_scenario: bad active count");
    Rng rng(seed);

    // Distinct active users via partial Fisher-Yates.
    std::vector<std::uint32_t> pool(sys.num_users);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::uint32_t i = 0; i < num_active; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }

    SlotScenario scn;
    scn.slot_len = cfg.slot_len;
    scn.seed = seed;
    const std::size_t cap = rsl_capacity_bits(cfg, cst);
    scn.signals = CMat(num_active, cfg.slot_len);
    for (std::uint32_t n = 0; n < num_active; ++n) {
        PacketRecord p;
        p.user_id = pool[n];
        p.payload = random_payload(p.user_id, cap, sys.num_users, rng);
        p.symbols = encode_rsl(p.payload, cfg, cst, rng);
        std::copy(p.symbols.begin(), p.symbols.end(), &scn.signals(n, 0));
        scn.packets.push_back(std::move(p));
    }
    scn.channels = CMat(sys.num_antennas, num_active);
    for (std::uint32_t n = 0; n < num_active; ++n) {
        // Transmit power is folded into the channel gain; codewords stay unit-energy.
        const auto h =
            draw_channel(sys.num_antennas, sys.power * sys.pathloss_for(scn.packets[n].user_id),
                         rng);
        for (std::uint32_t m = 0; m < sys.num_antennas; ++m) scn.channels(m, n) = h[m];
    }
    scn.noise = draw_noise(sys.num_antennas, cfg.slot_len, sigma2, rng);
    scn.observation = synth_slot(scn.channels, scn.signals, scn.noise);
    return scn;
}

std::vector<Arrival> gen_traffic(std::uint32_t num_users, double lambda, std::int64_t duration,
                                 std::uint32_t packet_len, std::uint32_t guard, Rng& rng) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("gen_traffic: lambda outside [0, 1]");
    if (duration < 0) throw std::invalid_argument("gen_traffic: negative duration");
    std::vector<Arrival> out;
    if (lambda == 0.0 || duration == 0) return out;
    const double logq = std::log1p(-lambda); // log(1 - lambda), -inf when lambda == 1
    for (std::uint32_t u = 0; u < num_users; ++u) {
        std::int64_t scan = 0;       // next symbol to examine
        std::int64_t next_legal = 0; // earliest start respecting the guard
        while (scan < duration) {
            std::int64_t gap = 0;
            if (lambda < 1.0) {
                const double r = std::log1p(-rng.uniform()) / logq;
                if (r >= static_cast<double>(duration)) break;
                gap = static_cast<std::int64_t>(r);
            }
            const std::int64_t arrival = scan + gap;
            if (arrival >= duration) break;
            const std::int64_t start = std::max(arrival, next_legal);
            if (start + packet_len > duration) break;
            out.push_back({u, start});
            next_legal = start + packet_len + guard;
            scan = arrival + 1;
        }
    }
    std::sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) {
        return a.start != b.start ? a.start < b.start : a.user_id < b.user_id;
    });
    return out;
}

CMat synth_stream(const std::vector<PacketRecord>& packets, const CMat& packet_channels,
                  const CMat& noise) {
    if (packet_channels.cols != packets.size())
        throw std::invalid_argument("synth_stream: channel count mismatch");
    CMat y = noise;
    for (std::size_t p = 0; p < packets.size(); ++p) {
        const auto& pkt = packets[p];
        if (pkt.start_time < 0 ||
            pkt.start_time + static_cast<std::int64_t>(pkt.symbols.size()) >
                static_cast<std::int64_t>(noise.cols))
            throw std::invalid_argument("synth_stream: packet outside stream");
        accumulate_rank_one(y, packet_channels, p, pkt.symbols.data(), pkt.symbols.size(),
                            static_cast<std::size_t>(pkt.start_time));
    }
    return y;
}

StreamScenario make_stream_scenario(const SystemConfig& sys, std::uint32_t packet_len,
                                    double lambda, std::uint32_t guard, std::int64_t duration,
                                    const Constellation& cst, double sigma2, std::uint64_t seed) {
    Rng rng(seed);
    StreamScenario scn;
    scn.num_antennas = sys.num_antennas;
    scn.duration = duration;
    scn.packet_len = packet_len;
    scn.lambda = lambda;
    scn.guard = guard;
    scn.sigma2 = sigma2;
    scn.seed = seed;

    const auto traffic = gen_traffic(sys.num_users, lambda, duration, packet_len, guard, rng);
    const std::size_t cap = ssl_capacity_bits(packet_len, cst);
    scn.packet_channels = CMat(sys.num_antennas, traffic.size());
    for (std::size_t p = 0; p < traffic.size(); ++p) {
        PacketRecord rec;
        rec.user_id = traffic[p].user_id;
        rec.start_time = traffic[p].start;
        rec.payload = random_payload(rec.user_id, cap, sys.num_users, rng);
        rec.symbols = encode_ssl(rec.payload, packet_len, cst);
        const auto h = draw_channel(sys.num_antennas,
                                    sys.power * sys.pathloss_for(rec.user_id), rng);
        for (std::uint32_t m = 0; m < sys.num_antennas; ++m) scn.packet_channels(m, p) = h[m];
        scn.packets.push_back(std::move(rec));
    }
    scn.noise = draw_noise(sys.num_antennas, static_cast<std::size_t>(duration), sigma2, rng);
    scn.samples = synth_stream(scn.packets, scn.packet_channels, scn.noise);
    return scn;
}

CMat reconstruct_window(const StreamScenario& scn, const WindowView& w) {
    CMat acc(scn.noise.rows, w.len);
    for (std::size_t m = 0; m < scn.noise.rows; ++m)
        for (std::uint32_t t = 0; t < w.len; ++t)
            acc(m, t) = scn.noise(m, static_cast<std::size_t>(w.start) + t);
    for (std::size_t p = 0; p < scn.packets.size(); ++p) {
        const auto& sym = scn.packets[p].symbols;
        const std::int64_t s = scn.packets[p].start_time;
        const std::int64_t a = std::max(s, w.start);
        const std::int64_t b = std::min(s + static_cast<std::int64_t>(sym.size()),
                                        w.start + static_cast<std::int64_t>(w.len));
        if (a >= b) continue;
        accumulate_rank_one(acc, scn.packet_channels, p,
                            sym.data() + static_cast<std::size_t>(a - s),
                            static_cast<std::size_t>(b - a),
                            static_cast<std::size_t>(a - w.start));
    }
    return acc;
}

PacketType classify_packet(std::int64_t start, std::int64_t t0, std::uint32_t window_len,
                           std::uint32_t packet_len) {
    const std::int64_t end = start + packet_len;        // exclusive
    const std::int64_t wend = t0 + window_len;          // exclusive
    if (end <= t0 || start >= wend) return PacketType::outside;
    if (start >= t0 && start <= wend - packet_len) return PacketType::type1;
    if (start < t0) return PacketType::type2;
    return PacketType::type3;
}

WindowView extract_window(const StreamScenario& scn, std::int64_t t0, std::uint32_t window_len) {
    if (t0 < 0 || t0 + window_len > scn.duration)
        throw std::invalid_argument("extract_window: window outside stream");
    WindowView w;
    w.start = t0;
    w.len = window_len;
    w.observation = CMat(scn.samples.rows, window_len);
    for (std::size_t m = 0; m < scn.samples.rows; ++m)
        for (std::uint32_t t = 0; t < window_len; ++t)
            w.observation(m, t) = scn.samples(m, static_cast<std::size_t>(t0) + t);

    for (std::size_t p = 0; p < scn.packets.size(); ++p) {
        const auto type =
            classify_packet(scn.packets[p].start_time, t0, window_len, scn.packet_len);
        if (type == PacketType::outside) continue;
        w.packet_index.push_back(p);
        w.offsets.push_back(scn.packets[p].start_time - t0);
        w.types.push_back(type);
    }

    const std::size_t n = w.packet_index.size();
    w.eff_channels = CMat(scn.samples.rows, n);
    w.eff_signals = CMat(n, window_len);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t p = w.packet_index[i];
        for (std::size_t m = 0; m < scn.samples.rows; ++m)
            w.eff_channels(m, i) = scn.packet_channels(m, p);
        const auto& sym = scn.packets[p].symbols;
        const std::int64_t s = scn.packets[p].start_time;
        const std::int64_t a = std::max(s, t0);
        const std::int64_t b = std::min(s + static_cast<std::int64_t>(sym.size()),
                                        t0 + static_cast<std::int64_t>(window_len));
        for (std::int64_t t = a; t < b; ++t)
            w.eff_signals(i, static_cast<std::size_t>(t - t0)) =
                sym[static_cast<std::size_t>(t - s)];
    }
    return w;
}

} // namespace gfmud
