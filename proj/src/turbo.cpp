// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gfmud/kernels.hpp"
#include "gfmud/rng.hpp"

namespace gfmud {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Log prefix sums with explicit zero counts, so products containing an exact
// zero stay exactly zero instead of underflowing.
struct LogPrefix {
    std::vector<double> sum;    // sum[i] = sum of log p over nonzero p[t], t < i
    std::vector<std::uint32_t> zeros; // zeros[i] = count of p[t] == 0, t < i

    explicit LogPrefix(const std::vector<double>& p) : sum(p.size() + 1, 0.0),
                                                       zeros(p.size() + 1, 0) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            sum[i + 1] = sum[i] + (p[i] > 0.0 ? std::log(p[i]) : 0.0);
            zeros[i + 1] = zeros[i] + (p[i] > 0.0 ? 0u : 1u);
        }
    }
    // over [a, b)
    double seg_sum(std::size_t a, std::size_t b) const { return sum[b] - sum[a]; }
    std::uint32_t seg_zeros(std::size_t a, std::size_t b) const { return zeros[b] - zeros[a]; }
};

} // namespace

std::int64_t OffsetPosterior::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[best]) best = i;
    return min_offset + static_cast<std::int64_t>(best);
}

double gamma_prime(std::uint32_t window_len, std::uint32_t packet_len) {
    if (window_len == 0 || packet_len == 0)
        throw std::invalid_argument("gamma_prime: zero length");
    const double tp = window_len, l = packet_len;
    return (2.0 * tp + l - 1.0) * l / (2.0 * (l + tp - 1.0) * tp);
}

OffsetPosterior offset_distribution(const std::vector<IndicatorMessage>& in,
                                    std::uint32_t packet_len,
                                    std::optional<std::size_t> exclude) {
    const std::size_t tp = in.size();
    const std::size_t l = packet_len;
    if (tp == 0) throw std::invalid_argument("offset_distribution: empty window");
    if (l == 0) throw std::invalid_argument("offset_distribution: zero packet length");
    if (exclude && *exclude >= tp)
        throw std::invalid_argument("offset_distribution: exclude index out of range");

    std::vector<double> p1(tp), p0(tp);
    for (std::size_t t = 0; t < tp; ++t) {
        p1[t] = clamp01(in[t].p1);
        p0[t] = 1.0 - p1[t];
    }
    const LogPrefix f1(p1), f0(p0);

    OffsetPosterior out;
    out.min_offset = -static_cast<std::int64_t>(l) + 1;
    const std::size_t count = tp + l - 1;
    std::vector<double> logp(count, kNegInf);
    double lmax = kNegInf;
    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t dt = out.min_offset + static_cast<std::int64_t>(i);
        // active span [a, b) in window coordinates
        const std::size_t a = static_cast<std::size_t>(std::max<std::int64_t>(dt, 0));
        const std::size_t b = static_cast<std::size_t>(
            std::min<std::int64_t>(dt + static_cast<std::int64_t>(l), tp));
        std::uint32_t zeros = f1.seg_zeros(a, b) + f0.seg_zeros(0, a) + f0.seg_zeros(b, tp);
        double s = f1.seg_sum(a, b) + f0.seg_sum(0, a) + f0.seg_sum(b, tp);
        if (exclude) {
            const std::size_t e = *exclude;
            if (e >= a && e < b) {
                zeros -= (p1[e] > 0.0 ? 0u : 1u);
                s -= (p1[e] > 0.0 ? std::log(p1[e]) : 0.0);
            } else {
                zeros -= (p0[e] > 0.0 ? 0u : 1u);
                s -= (p0[e] > 0.0 ? std::log(p0[e]) : 0.0);
            }
        }
        if (zeros == 0) {
            logp[i] = s;
            if (s > lmax) lmax = s;
        }
    }

    out.probs.assign(count, 0.0);
    if (lmax == kNegInf) {
        // No offset is consistent with the messages; fall back to uniform.
        out.degenerate = true;
        std::fill(out.probs.begin(), out.probs.end(), 1.0 / static_cast<double>(count));
        return out;
    }
    double w = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (logp[i] != kNegInf) {
            out.probs[i] = std::exp(logp[i] - lmax);
            w += out.probs[i];
        }
    }
    const double inv = 1.0 / w;
    for (double& p : out.probs) p *= inv;
    return out;
}

std::vector<IndicatorMessage> sparsity_messages(const std::vector<IndicatorMessage>& in,
                                                std::uint32_t packet_len) {
    const std::size_t tp = in.size();
    const std::size_t l = packet_len;
    std::vector<IndicatorMessage> out(tp);
    for (std::size_t t = 0; t < tp; ++t) {
        const OffsetPosterior loo = offset_distribution(in, packet_len, t);
        // t is inside the span of offsets dt in [t-L+1, t]
        const std::int64_t first = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(l) + 1;
        double s = 0.0;
        for (std::int64_t dt = first; dt <= static_cast<std::int64_t>(t); ++dt)
            s += loo.probs[static_cast<std::size_t>(dt - loo.min_offset)];
        out[t].p1 = clamp01(s);
    }
    return out;
}

IndicatorMessage x_to_d(const MarginalPosterior& post) {
    return {clamp01(1.0 - post.zero_mass)};
}

std::pair<EntryPriorX, bool> d_to_x_prior(const IndicatorMessage& msg, const EntryPriorX& base) {
    base.validate();
    const double p1 = clamp01(msg.p1);
    const std::size_t k = base.points.size();
    EntryPriorX out;
    out.points = base.points;
    out.masses.resize(k);
    const double zw = (1.0 - p1) * base.zero_mass;
    double total = zw;
    for (std::size_t i = 0; i < k; ++i) {
        out.masses[i] = (p1 / static_cast<double>(k)) * base.masses[i];
        total += out.masses[i];
    }
    if (!(total > 0.0)) return {base, true};
    const double inv = 1.0 / total;
    out.zero_mass = zw * inv;
    for (double& m : out.masses) m *= inv;
    return {out, false};
}

BigAmpResult run_turbo(const CMat& y, std::size_t n, std::uint32_t packet_len,
                       EntryPriorH prior_h, double sigma2, const Constellation& cst,
                       const TurboOptions& topts, const BigAmpOptions& bopts) {
    if (n == 0) throw std::invalid_argument("run_turbo: no rows");
    const std::size_t tp = y.cols;
    if (packet_len == 0 || packet_len > tp)
        throw std::invalid_argument("run_turbo: packet length outside (0, Tp]");
    if (topts.trials == 0 || topts.outer_rounds == 0)
        throw std::invalid_argument("run_turbo: trials and rounds must be >= 1");

    const EntryPriorX base =
        EntryPriorX::sparse_uniform(gamma_prime(static_cast<std::uint32_t>(tp), packet_len),
                                    cst);
    // Flat standing prior for the sparsity rebuild: the product with the
    // indicator message then equals (1-p1) on zero and p1 across the symbols,
    // so the per-entry prior carries exactly the offset information.
    EntryPriorX flat;
    flat.points = base.points;
    const double fm = 1.0 / (static_cast<double>(base.points.size()) + 1.0);
    flat.zero_mass = fm;
    flat.masses.assign(base.points.size(), fm);
    const auto& kops = kernels::ops();

    std::vector<BigAmpResult> results;
    results.reserve(topts.trials);
    for (std::uint32_t j = 0; j < topts.trials; ++j) {
        BigAmpEngine eng(y, PriorXGrid::uniform(base, n, tp), prior_h, sigma2, bopts,
                         derive_seed(bopts.seed, {j}));
        SplitMat x_prev;
        bool last_round = false;
        for (std::uint32_t round = 0; round < topts.outer_rounds; ++round) {
            const auto stop = eng.run(bopts.max_iters);
            if (stop == BigAmpEngine::Stop::diverged) break;
            const SplitMat& x_now = eng.cur_x_mean();
            if (round > 0) {
                const double d2 = kops.sum_sq_diff(x_now.re.data(), x_now.im.data(),
                                                   x_prev.re.data(), x_prev.im.data(),
                                                   x_now.size());
                double n2 = 0.0;
                for (std::size_t i = 0; i < x_prev.size(); ++i)
                    n2 += x_prev.re[i] * x_prev.re[i] + x_prev.im[i] * x_prev.im[i];
                if (std::sqrt(d2 / std::max(n2, 1e-300)) < topts.tol) break;
            }
            x_prev = x_now;
            if (last_round || round + 1 == topts.outer_rounds) break;

            // Sparsity pass: per-row leave-one-out offset messages refresh
            // every entry's prior.
            const RMat& zm = eng.cur_x_zero();
            PriorXGrid next;
            next.points = base.points;
            next.zero_mass = RMat(n, tp);
            bool all_confident = true;
            std::vector<IndicatorMessage> row(tp);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t t = 0; t < tp; ++t) row[t].p1 = clamp01(1.0 - zm(r, t));
                const auto msgs = sparsity_messages(row, packet_len);
                for (std::size_t t = 0; t < tp; ++t)
                    next.zero_mass(r, t) = d_to_x_prior(msgs[t], flat).first.zero_mass;
                if (topts.early_exit) {
                    const auto full = offset_distribution(row, packet_len);
                    const double top =
                        *std::max_element(full.probs.begin(), full.probs.end());
                    if (full.degenerate || top < topts.early_exit_mass) all_confident = false;
                }
            }
            // Offsets all resolved: apply the prior once more, then stop.
            if (topts.early_exit && all_confident) last_round = true;
            eng.set_prior_x(std::move(next));
        }
        BigAmpResult res = eng.result();
        res.trial = j;
        results.push_back(std::move(res));
    }
    return select_best(results);
}

} // namespace gfmud
