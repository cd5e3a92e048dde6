// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "gfmud/rng.hpp"

namespace gfmud {

namespace {

// Task fan-out over a fixed-size worker pool. Exceptions from workers are
// rethrown (first one wins).
void parallel_for(std::size_t n, std::uint32_t threads,
                  const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    const std::size_t pool = std::min<std::size_t>(threads, n);
    std::vector<std::thread> ts;
    ts.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
    if (err) std::rethrow_exception(err);
}

double sigma2_for(const ExperimentConfig& cfg, double snr_db) {
    return cfg.power * std::pow(10.0, -snr_db / 10.0);
}

void finish_row(MetricRow& row) {
    const double sent = static_cast<double>(row.packets_sent);
    row.per = row.packets_sent == 0
                  ? 1.0
                  : 1.0 - static_cast<double>(row.packets_recovered) / sent;
    row.per_se = row.packets_sent == 0 ? 0.0 : std::sqrt(row.per * (1.0 - row.per) / sent);
}

RslDetectorConfig rsl_detector(const ExperimentConfig& cfg, std::uint64_t det_seed) {
    RslDetectorConfig det;
    det.num_active = cfg.active_users;
    det.sparsity = cfg.code_sparsity;
    det.zero_threshold = cfg.zero_threshold;
    det.restarts = cfg.restarts;
    det.prior_h.variance = cfg.prior_h_var;
    det.bigamp.max_iters = cfg.max_iters;
    det.bigamp.tol = cfg.engine_tol;
    det.bigamp.step_min = cfg.step_min;
    det.bigamp.step_max = cfg.step_max;
    det.bigamp.step_grow = cfg.step_grow;
    det.bigamp.seed = det_seed;
    return det;
}

BigAmpOptions engine_options(const ExperimentConfig& cfg, std::uint64_t det_seed) {
    BigAmpOptions b;
    b.max_iters = cfg.max_iters;
    b.tol = cfg.engine_tol;
    b.step_min = cfg.step_min;
    b.step_max = cfg.step_max;
    b.step_grow = cfg.step_grow;
    b.seed = det_seed;
    return b;
}

MetricRow rsl_point(const ExperimentConfig& cfg, std::size_t snr_index) {
    const Constellation cst = Constellation::qpsk();
    const RslCodecConfig ccfg = RslCodecConfig::make(cfg.slot_len, cfg.code_sparsity, cfg.users);
    const SystemConfig sys{cfg.users, cfg.antennas, cfg.power, {}};
    const double snr = cfg.snr_db[snr_index];
    const double sigma2 = sigma2_for(cfg, snr);
    const std::uint64_t n = cfg.active_users;
    const std::uint64_t slots = (cfg.packet_budget + n - 1) / n;

    // Scenario seeds are keyed by task index only, never by SNR, so sweep
    // points share packets, channels and unit noise draws (paired seeds).
    std::vector<std::uint64_t> rec(slots, 0);
    parallel_for(slots, cfg.threads, [&](std::size_t j) {
        const SlotScenario scn = make_slot_scenario(sys, ccfg, cst, cfg.active_users, sigma2,
                                                    derive_seed(cfg.seed, {j, 0}));
        const auto det = rsl_detector(cfg, derive_seed(cfg.seed, {j, 1}));
        const auto claims = detect_slot(scn.observation, sigma2, det, ccfg, cst);
        rec[j] = score_slot(scn, claims);
    });

    MetricRow row;
    row.scheme = to_string(cfg.scheme);
    row.m = cfg.antennas;
    row.n = cfg.active_users;
    row.t_slot = cfg.slot_len;
    row.gamma = cfg.code_sparsity;
    row.snr_db = snr;
    row.packets_sent = slots * n;
    for (std::uint64_t r : rec) row.packets_recovered += r;
    row.seed = cfg.seed;
    finish_row(row);
    return row;
}

StreamScore stream_chunk_task(const ExperimentConfig& cfg, const Constellation& cst,
                              std::size_t chunk, double sigma2) {
    const SystemConfig sys{cfg.users, cfg.antennas, cfg.power, {}};
    const auto j = static_cast<std::uint64_t>(chunk);
    const StreamScenario scn =
        make_stream_scenario(sys, cfg.packet_len, cfg.lambda, cfg.guard, cfg.stream_chunk, cst,
                             sigma2, derive_seed(cfg.seed, {j, 0}));
    const WindowSchedule sched{cfg.window_len, cfg.window_step};
    const std::uint64_t det_seed = derive_seed(cfg.seed, {j, 1});

    std::vector<RecoveredPacket> claims;
    switch (cfg.scheme) {
    case Scheme::ssl: {
        SslDetectorOptions opts;
        opts.turbo.outer_rounds = cfg.outer_rounds;
        opts.turbo.trials = cfg.turbo_trials;
        opts.turbo.early_exit = cfg.early_exit;
        opts.bigamp = engine_options(cfg, det_seed);
        opts.prior_h.variance = cfg.prior_h_var;
        opts.num_users = cfg.users;
        opts.extra_rows = cfg.extra_rows;
        claims = sliding_detect(scn, sched, cst, opts);
        break;
    }
    case Scheme::csi_gamp:
        claims = sliding_detect_csi_gamp(scn, sched, cst, cfg.users,
                                         engine_options(cfg, det_seed));
        break;
    case Scheme::oracle_lmmse:
        claims = sliding_detect_lmmse(scn, sched, cst, cfg.users, cfg.power);
        break;
    case Scheme::rsl: throw ConfigError("config: rsl is not a stream scheme");
    }
    return score_stream(scn, sched, claims);
}

MetricRow stream_point(const ExperimentConfig& cfg, std::size_t snr_index) {
    const Constellation cst = Constellation::qpsk();
    const double snr = cfg.snr_db[snr_index];
    const double sigma2 = sigma2_for(cfg, snr);

    // Chunks are folded strictly in index order until the coverable-packet
    // budget is met, so the aggregated set is independent of thread count.
    std::vector<StreamScore> scores;
    std::uint64_t sent = 0, recovered = 0;
    std::size_t folded = 0;
    std::size_t next_chunk = 0;
    const std::size_t batch = std::max<std::uint32_t>(cfg.threads, 1);
    while (sent < cfg.packet_budget) {
        if (next_chunk > 1000000)
            throw std::runtime_error("per_sweep: packet budget unreachable at this traffic rate");
        scores.resize(next_chunk + batch);
        parallel_for(batch, cfg.threads, [&](std::size_t b) {
            scores[next_chunk + b] = stream_chunk_task(cfg, cst, next_chunk + b, sigma2);
        });
        next_chunk += batch;
        while (folded < next_chunk && sent < cfg.packet_budget) {
            sent += scores[folded].sent;
            recovered += scores[folded].recovered;
            ++folded;
        }
    }

    MetricRow row;
    row.scheme = to_string(cfg.scheme);
    row.m = cfg.antennas;
    row.lambda = cfg.lambda;
    row.l_packet = cfg.packet_len;
    row.t_window = cfg.window_len;
    row.dt_window = cfg.window_step;
    row.gamma = gamma_prime(cfg.window_len, cfg.packet_len);
    row.snr_db = snr;
    row.packets_sent = sent;
    row.packets_recovered = recovered;
    row.seed = cfg.seed;
    finish_row(row);
    return row;
}

} // namespace

std::vector<MetricRow> per_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<MetricRow> rows;
    rows.reserve(cfg.snr_db.size());
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        MetricRow row = cfg.stream_scheme() ? stream_point(cfg, i) : rsl_point(cfg, i);
        if (cfg.timings) {
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TransitionPoint> phase_transition(const std::vector<double>& gammas,
                                              double per_target, const ExperimentConfig& cfg) {
    if (!(per_target > 0.0) || per_target >= 1.0)
        throw ConfigError("config: per_target must be in (0, 1)");
    if (gammas.empty()) throw ConfigError("config: gamma grid must be non-empty");
    ExperimentConfig base = cfg;
    base.scheme = Scheme::rsl;
    base.snr_db = {cfg.snr_db.front()};

    std::vector<TransitionPoint> out;
    out.reserve(gammas.size());
    for (double g : gammas) {
        TransitionPoint pt;
        pt.gamma = g;
        for (std::uint32_t n = 1; n <= cfg.users; ++n) {
            ExperimentConfig c = base;
            c.code_sparsity = g;
            c.active_users = n;
            const MetricRow row = per_sweep(c).front();
            if (row.per <= per_target)
                pt.max_n = n;
            else
                break;
        }
        pt.throughput = throughput_bits_per_symbol(pt.max_n, cfg.slot_len, g, cfg.users);
        out.push_back(pt);
    }
    return out;
}

MetricRow replay_file(const std::string& path, const ExperimentConfig& cfg) {
    cfg.validate();
    const Constellation cst = Constellation::qpsk();
    const std::uint32_t kind = stored_scenario_kind(path);

    MetricRow row;
    row.seed = cfg.seed;
    if (kind == 1) {
        if (cfg.stream_scheme())
            throw ConfigError("replay: slotted scenario requires scheme = rsl");
        const SlotScenario scn = load_slot_scenario(path);
        if (scn.slot_len != cfg.slot_len)
            throw ConfigError("replay: config slot_len does not match the scenario");
        const RslCodecConfig ccfg =
            RslCodecConfig::make(cfg.slot_len, cfg.code_sparsity, cfg.users);
        const double snr = cfg.snr_db.front();
        const double sigma2 = sigma2_for(cfg, snr);
        ExperimentConfig c = cfg;
        c.active_users = static_cast<std::uint32_t>(scn.packets.size());
        const auto det = rsl_detector(c, derive_seed(cfg.seed, {0, 1}));
        const auto claims = detect_slot(scn.observation, sigma2, det, ccfg, cst);
        row.scheme = to_string(cfg.scheme);
        row.m = static_cast<std::uint32_t>(scn.observation.rows);
        row.n = static_cast<std::uint32_t>(scn.packets.size());
        row.t_slot = scn.slot_len;
        row.gamma = cfg.code_sparsity;
        row.snr_db = snr;
        row.packets_sent = scn.packets.size();
        row.packets_recovered = score_slot(scn, claims);
    } else {
        if (!cfg.stream_scheme())
            throw ConfigError("replay: stream scenario requires a stream scheme");
        const StreamScenario scn = load_stream_scenario(path);
        const WindowSchedule sched{cfg.window_len, cfg.window_step};
        sched.validate(scn.packet_len);
        const std::uint64_t det_seed = derive_seed(cfg.seed, {0, 1});
        std::vector<RecoveredPacket> claims;
        if (cfg.scheme == Scheme::ssl) {
            SslDetectorOptions opts;
            opts.turbo.outer_rounds = cfg.outer_rounds;
            opts.turbo.trials = cfg.turbo_trials;
            opts.turbo.early_exit = cfg.early_exit;
            opts.bigamp = engine_options(cfg, det_seed);
            opts.prior_h.variance = cfg.prior_h_var;
            opts.num_users = cfg.users;
            opts.extra_rows = cfg.extra_rows;
            claims = sliding_detect(scn, sched, cst, opts);
        } else if (cfg.scheme == Scheme::csi_gamp) {
            claims = sliding_detect_csi_gamp(scn, sched, cst, cfg.users,
                                             engine_options(cfg, det_seed));
        } else {
            claims = sliding_detect_lmmse(scn, sched, cst, cfg.users, cfg.power);
        }
        const StreamScore sc = score_stream(scn, sched, claims);
        row.scheme = to_string(cfg.scheme);
        row.m = scn.num_antennas;
        row.lambda = scn.lambda;
        row.l_packet = scn.packet_len;
        row.t_window = cfg.window_len;
        row.dt_window = cfg.window_step;
        row.gamma = gamma_prime(cfg.window_len, scn.packet_len);
        row.snr_db = scn.sigma2 > 0.0 ? 10.0 * std::log10(cfg.power / scn.sigma2) : 999.0;
        row.packets_sent = sc.sent;
        row.packets_recovered = sc.recovered;
    }
    finish_row(row);
    return row;
}

} // namespace gfmud
