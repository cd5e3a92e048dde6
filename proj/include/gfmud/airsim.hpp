// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfmud/codec.hpp"
#include "gfmud/constellation.hpp"
#include "gfmud/mat.hpp"
#include "gfmud/rng.hpp"

namespace gfmud {

// System-level parameters shared by both access schemes.
struct SystemConfig {
    std::uint32_t num_users = 200;
    std::uint32_t num_antennas = 16;
    double power = 1.0;                   // per-user transmit power P
    std::vector<double> pathloss;         // beta_u per user; empty means all 1.0
    double pathloss_for(std::uint32_t u) const {
        return pathloss.empty() ? 1.0 : pathloss.at(u);
    }
};

// Rayleigh block-fading channel: h = sqrt(beta) * g, g ~ CN(0, I_M).
std::vector<cplx> draw_channel(std::uint32_t num_antennas, double beta, Rng& rng);

// One synchronized slot: N active users, Y = sum_n h_n x_n^T + W.
struct SlotScenario {
    std::uint32_t slot_len = 0;
    std::vector<PacketRecord> packets;   // one per active user
    CMat channels;                        // M x N
    CMat signals;                         // N x T (rows are codewords)
    CMat noise;                           // M x T
    CMat observation;                     // M x T
    std::uint64_t seed = 0;
};

// Superimpose rank-one contributions over noise. channels is M x N, one row
// of `signals` per packet.
CMat synth_slot(const CMat& channels, const CMat& signals, const CMat& noise);

// Draw N distinct users, random payloads, codewords, channels and noise.
SlotScenario make_slot_scenario(const SystemConfig& sys, const RslCodecConfig& cfg,
                                const Constellation& cst, std::uint32_t num_active,
                                double sigma2, std::uint64_t seed);

// Asynchronous traffic: per-user, per-symbol Bernoulli(lambda) arrivals. An
// arrival closer than packet_len + guard symbols to the user's previous
// accepted start is deferred to the earliest legal start; packets that would
// run past `duration` are dropped.
struct Arrival {
    std::uint32_t user_id = 0;
    std::int64_t start = 0;
};
std::vector<Arrival> gen_traffic(std::uint32_t num_users, double lambda, std::int64_t duration,
                                 std::uint32_t packet_len, std::uint32_t guard, Rng& rng);

// Continuous stream of unslotted packets.
struct StreamScenario {
    std::uint32_t num_antennas = 0;
    std::int64_t duration = 0;
    std::uint32_t packet_len = 0;
    double lambda = 0.0;
    std::uint32_t guard = 0;
    double sigma2 = 0.0;
    std::vector<PacketRecord> packets;   // start_time set, sorted by start
    CMat packet_channels;                 // M x |packets|, one column per packet
    CMat noise;                           // M x duration
    CMat samples;                         // M x duration
    std::uint64_t seed = 0;
};

// Superimpose packets onto the noise floor at their start times.
CMat synth_stream(const std::vector<PacketRecord>& packets, const CMat& packet_channels,
                  const CMat& noise);

StreamScenario make_stream_scenario(const SystemConfig& sys, std::uint32_t packet_len,
                                    double lambda, std::uint32_t guard, std::int64_t duration,
                                    const Constellation& cst, double sigma2, std::uint64_t seed);

// Relation of a packet [start, start+L) to a window [t0, t0+Tp).
//   type1:   fully inside (start in [t0, t0+Tp-L])
//   type2:   head truncated (start in [t0-L+1, t0))
//   type3:   tail truncated (start in (t0+Tp-L, t0+Tp))
//   outside: no overlap
enum class PacketType { type1, type2, type3, outside };
PacketType classify_packet(std::int64_t start, std::int64_t t0, std::uint32_t window_len,
                           std::uint32_t packet_len);

// A window of the stream plus ground-truth metadata for scoring.
struct WindowView {
    std::int64_t start = 0;
    std::uint32_t len = 0;
    CMat observation;                     // M x len
    std::vector<std::size_t> packet_index; // overlapping packets, stream order
    std::vector<std::int64_t> offsets;     // packet start - window start
    std::vector<PacketType> types;
    CMat eff_channels;                    // M x N columns for overlapping packets
    CMat eff_signals;                     // N x len, symbols clipped to the window
    std::uint32_t count() const { return static_cast<std::uint32_t>(packet_index.size()); }
};

WindowView extract_window(const StreamScenario& scn, std::int64_t t0, std::uint32_t window_len);

// Rebuilds a window observation from ground truth (noise plus clipped
// rank-one packet contributions). Bit-identical to the extracted window.
CMat reconstruct_window(const StreamScenario& scn, const WindowView& w);

// Binary scenario serialization (little-endian, layout documented in README).
// stored_scenario_kind peeks the header: 1 = slot, 2 = stream.
std::uint32_t stored_scenario_kind(const std::string& path);
void save_stream_scenario(const std::string& path, const StreamScenario& scn);
StreamScenario load_stream_scenario(const std::string& path);
void save_slot_scenario(const std::string& path, const SlotScenario& scn);
SlotScenario load_slot_scenario(const std::string& path);

} // namespace gfmud
