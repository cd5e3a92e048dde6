// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "gfmud/airsim.hpp"

using namespace gfmud;

namespace {

const char* kTmpPath = "airsim_io_test.bin";

struct TmpFile {
    ~TmpFile() { std::remove(kTmpPath); }
};

double max_abs(const CMat& a, const CMat& b) {
    REQUIRE(a.rows == b.rows);
    REQUIRE(a.cols == b.cols);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

} // namespace

TEST_CASE("channel draw matches the pathloss scaling") {
    Rng rng(19);
    const auto h = draw_channel(4096, 2.25, rng);
    REQUIRE(h.size() == 4096);
    double p = 0.0;
    for (const auto& x : h) p += std::norm(x);
    p /= static_cast<double>(h.size());
    CHECK(p == doctest::Approx(2.25).epsilon(0.05)); // E|h|^2 = beta
}

TEST_CASE("synth_slot equals the hand-computed superposition") {
    CMat h(2, 2), x(2, 3), w(2, 3);
    h(0, 0) = {1, 0};
    h(1, 0) = {0, 1};
    h(0, 1) = {2, 0};
    h(1, 1) = {0, -1};
    x(0, 0) = {1, 1};
    x(0, 1) = {0, 0};
    x(0, 2) = {-1, 0};
    x(1, 0) = {0, 0};
    x(1, 1) = {1, -1};
    x(1, 2) = {0, 2};
    w.fill({0.5, -0.25});
    const auto y = synth_slot(h, x, w);
    for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t t = 0; t < 3; ++t) {
            cplx expect = w(m, t);
            for (std::size_t n = 0; n < 2; ++n) expect += h(m, n) * x(n, t);
            CHECK(std::abs(y(m, t) - expect) < 1e-15);
        }
}

TEST_CASE("slot scenario is consistent and reproducible") {
    SystemConfig sys;
    sys.num_users = 50;
    sys.num_antennas = 8;
    const auto cfg = RslCodecConfig::make(32, 0.25, sys.num_users);
    const auto cst = Constellation::qpsk();
    const auto scn = make_slot_scenario(sys, cfg, cst, 6, 0.01, 99);
    REQUIRE(scn.packets.size() == 6);
    CHECK(scn.channels.rows == 8);
    CHECK(scn.channels.cols == 6);
    CHECK(scn.signals.rows == 6);
    CHECK(scn.signals.cols == 32);
    std::set<std::uint32_t> users;
    for (std::size_t i = 0; i < scn.packets.size(); ++i) {
        const auto& p = scn.packets[i];
        users.insert(p.user_id);
        CHECK(p.user_id < sys.num_users);
        REQUIRE(p.symbols.size() == 32);
        for (std::size_t t = 0; t < 32; ++t)
            CHECK(std::abs(scn.signals(i, t) - p.symbols[t]) < 1e-15);
        const auto dec = decode_rsl(p.symbols, cfg, cst);
        REQUIRE(dec.has_value());
        CHECK(*dec == p.payload);
    }
    CHECK(users.size() == 6); // distinct actives
    CHECK(max_abs(scn.observation, synth_slot(scn.channels, scn.signals, scn.noise)) < 1e-15);

    const auto again = make_slot_scenario(sys, cfg, cst, 6, 0.01, 99);
    CHECK(max_abs(scn.observation, again.observation) == 0.0);
    const auto other = make_slot_scenario(sys, cfg, cst, 6, 0.01, 100);
    CHECK(max_abs(scn.observation, other.observation) > 0.0);
}

TEST_CASE("traffic respects guard spacing and the duration") {
    Rng rng(23);
    const std::uint32_t L = 16, guard = 4;
    const std::int64_t dur = 20000;
    const auto arr = gen_traffic(40, 2e-3, dur, L, guard, rng);
    REQUIRE(!arr.empty());
    std::vector<std::int64_t> last(40, -1000000);
    for (const auto& a : arr) {
        CHECK(a.start >= 0);
        CHECK(a.start + L <= dur);
        if (last[a.user_id] > -1000000) CHECK(a.start - last[a.user_id] >= L + guard);
        last[a.user_id] = a.start;
    }
}

TEST_CASE("packet classification matches brute-force overlap") {
    const std::int64_t t0 = 100;
    const std::uint32_t tp = 32, l = 8;
    for (std::int64_t s = t0 - 2 * l; s < t0 + tp + l; ++s) {
        const bool overlap = s < t0 + tp && s + l > t0;
        const auto c = classify_packet(s, t0, tp, l);
        if (!overlap) {
            CHECK(c == PacketType::outside);
        } else if (s >= t0 && s + l <= t0 + tp) {
            CHECK(c == PacketType::type1);
        } else if (s < t0) {
            CHECK(c == PacketType::type2);
        } else {
            CHECK(c == PacketType::type3);
        }
    }
}

TEST_CASE("stream scenario, window extraction and reconstruction") {
    SystemConfig sys;
    sys.num_users = 60;
    sys.num_antennas = 4;
    const auto cst = Constellation::qpsk();
    const auto scn = make_stream_scenario(sys, 16, 1e-3, 16, 4096, cst, 0.05, 1234);
    REQUIRE(!scn.packets.empty());
    CHECK(scn.samples.rows == 4);
    CHECK(scn.samples.cols == 4096);
    CHECK(scn.packet_channels.cols == scn.packets.size());
    for (std::size_t i = 1; i < scn.packets.size(); ++i)
        CHECK(scn.packets[i - 1].start_time <= scn.packets[i].start_time);
    CHECK(max_abs(scn.samples, synth_stream(scn.packets, scn.packet_channels, scn.noise)) == 0.0);

    for (std::int64_t t0 : {std::int64_t{0}, std::int64_t{777}, std::int64_t{4032}}) {
        const auto w = extract_window(scn, t0, 64);
        CHECK(w.start == t0);
        CHECK(w.len == 64);
        CHECK(w.observation.rows == 4);
        CHECK(w.observation.cols == 64);
        // The extracted window is exactly the stream slice.
        for (std::size_t m = 0; m < 4; ++m)
            for (std::size_t t = 0; t < 64; ++t)
                CHECK(w.observation(m, t) == scn.samples(m, static_cast<std::size_t>(t0) + t));
        // And reconstruction from ground truth is bit-identical.
        CHECK(max_abs(reconstruct_window(scn, w), w.observation) == 0.0);
        // Membership matches the classifier; offsets are consistent.
        std::set<std::size_t> inside(w.packet_index.begin(), w.packet_index.end());
        for (std::size_t i = 0; i < scn.packets.size(); ++i) {
            const auto c = classify_packet(scn.packets[i].start_time, t0, 64, 16);
            CHECK((c != PacketType::outside) == (inside.count(i) > 0));
        }
        for (std::size_t k = 0; k < w.packet_index.size(); ++k) {
            const auto& pkt = scn.packets[w.packet_index[k]];
            CHECK(w.offsets[k] == pkt.start_time - t0);
            CHECK(w.types[k] == classify_packet(pkt.start_time, t0, 64, 16));
            // eff_signals carries the clipped codeword at the offset.
            for (std::int64_t t = 0; t < 64; ++t) {
                const std::int64_t j = t - w.offsets[k];
                const cplx expect =
                    (j >= 0 && j < 16) ? pkt.symbols[static_cast<std::size_t>(j)] : cplx{};
                CHECK(std::abs(w.eff_signals(k, static_cast<std::size_t>(t)) - expect) < 1e-15);
            }
        }
    }
}

TEST_CASE("stream scenario io round trip") {
    TmpFile guard;
    SystemConfig sys;
    sys.num_users = 30;
    sys.num_antennas = 3;
    const auto cst = Constellation::qpsk();
    const auto scn = make_stream_scenario(sys, 8, 2e-3, 8, 1024, cst, 0.1, 77);
    save_stream_scenario(kTmpPath, scn);
    CHECK(stored_scenario_kind(kTmpPath) == 2);
    const auto back = load_stream_scenario(kTmpPath);
    CHECK(back.num_antennas == scn.num_antennas);
    CHECK(back.duration == scn.duration);
    CHECK(back.packet_len == scn.packet_len);
    CHECK(back.lambda == scn.lambda);
    CHECK(back.guard == scn.guard);
    CHECK(back.sigma2 == scn.sigma2);
    CHECK(back.seed == scn.seed);
    REQUIRE(back.packets.size() == scn.packets.size());
    for (std::size_t i = 0; i < scn.packets.size(); ++i) {
        CHECK(back.packets[i].user_id == scn.packets[i].user_id);
        CHECK(back.packets[i].payload == scn.packets[i].payload);
        CHECK(back.packets[i].start_time == scn.packets[i].start_time);
        REQUIRE(back.packets[i].symbols.size() == scn.packets[i].symbols.size());
        for (std::size_t t = 0; t < scn.packets[i].symbols.size(); ++t)
            CHECK(back.packets[i].symbols[t] == scn.packets[i].symbols[t]);
    }
    CHECK(max_abs(back.samples, scn.samples) == 0.0);
    CHECK(max_abs(back.noise, scn.noise) == 0.0);
    CHECK(max_abs(back.packet_channels, scn.packet_channels) == 0.0);
}

TEST_CASE("slot scenario io round trip") {
    TmpFile guard;
    SystemConfig sys;
    sys.num_users = 20;
    sys.num_antennas = 4;
    const auto cfg = RslCodecConfig::make(16, 0.25, sys.num_users);
    const auto cst = Constellation::qpsk();
    const auto scn = make_slot_scenario(sys, cfg, cst, 3, 0.02, 55);
    save_slot_scenario(kTmpPath, scn);
    CHECK(stored_scenario_kind(kTmpPath) == 1);
    const auto back = load_slot_scenario(kTmpPath);
    CHECK(back.slot_len == scn.slot_len);
    CHECK(back.seed == scn.seed);
    REQUIRE(back.packets.size() == scn.packets.size());
    for (std::size_t i = 0; i < scn.packets.size(); ++i) {
        CHECK(back.packets[i].user_id == scn.packets[i].user_id);
        CHECK(back.packets[i].payload == scn.packets[i].payload);
    }
    CHECK(max_abs(back.observation, scn.observation) == 0.0);
    CHECK(max_abs(back.channels, scn.channels) == 0.0);
    CHECK(max_abs(back.signals, scn.signals) == 0.0);
    CHECK(max_abs(back.noise, scn.noise) == 0.0);
}
