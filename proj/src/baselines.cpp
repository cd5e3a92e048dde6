// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/baselines.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gfmud {

OracleSideInfo OracleSideInfo::from_window(const WindowView& w) {
    OracleSideInfo side;
    side.channels = w.eff_channels;
    side.rows = w.eff_signals.rows;
    side.cols = w.eff_signals.cols;
    side.support.assign(side.rows * side.cols, 0);
    for (std::size_t i = 0; i < w.eff_signals.size(); ++i)
        if (w.eff_signals.v[i] != cplx{}) side.support[i] = 1;
    return side;
}

LmmseResult oracle_lmmse(const CMat& y, const OracleSideInfo& side, double sigma2, double power,
                         const Constellation& cst) {
    const std::size_t m = y.rows, t_len = y.cols, n = side.rows;
    if (side.channels.rows != m || side.channels.cols != n || side.cols != t_len)
        throw std::invalid_argument("oracle_lmmse: dimension mismatch");

    LmmseResult res;
    res.soft = CMat(n, t_len);
    res.hard = CMat(n, t_len);

    std::vector<std::size_t> active;
    for (std::size_t t = 0; t < t_len; ++t) {
        active.clear();
        for (std::size_t r = 0; r < n; ++r)
            if (side.active(r, t)) active.push_back(r);
        if (active.empty()) continue;

        Eigen::MatrixXcd hs(m, active.size());
        for (std::size_t k = 0; k < active.size(); ++k)
            for (std::size_t i = 0; i < m; ++i) hs(i, k) = side.channels(i, active[k]);
        Eigen::VectorXcd yt(m);
        for (std::size_t i = 0; i < m; ++i) yt(i) = y(i, t);

        Eigen::MatrixXcd a = power * (hs * hs.adjoint());
        a.diagonal().array() += sigma2;
        Eigen::VectorXcd z;
        if (sigma2 > 0.0) {
            z = a.ldlt().solve(yt);
        } else {
            // Noiseless covariance has rank <= |S_t| and is usually singular.
            res.used_pseudo_inverse = true;
            z = a.completeOrthogonalDecomposition().solve(yt);
        }
        const Eigen::VectorXcd xs = power * (hs.adjoint() * z);
        for (std::size_t k = 0; k < active.size(); ++k) {
            const cplx v{xs(static_cast<Eigen::Index>(k)).real(),
                         xs(static_cast<Eigen::Index>(k)).imag()};
            res.soft(active[k], t) = v;
            res.hard(active[k], t) = cst.points[cst.nearest(v)];
        }
    }
    return res;
}

std::vector<RecoveredPacket> lmmse_window_detect(const WindowView& w, std::uint32_t packet_len,
                                                 double sigma2, double power,
                                                 const Constellation& cst,
                                                 std::uint32_t window_index) {
    const auto side = OracleSideInfo::from_window(w);
    const auto est = oracle_lmmse(w.observation, side, sigma2, power, cst);

    std::vector<RecoveredPacket> out;
    for (std::size_t i = 0; i < w.packet_index.size(); ++i) {
        if (w.types[i] != PacketType::type1) continue;
        const auto off = static_cast<std::size_t>(w.offsets[i]);
        std::vector<cplx> sym(packet_len);
        for (std::uint32_t j = 0; j < packet_len; ++j) sym[j] = est.hard(i, off + j);
        const auto payload = decode_ssl(sym, cst);
        if (!payload) continue;
        RecoveredPacket p;
        p.payload = *payload;
        p.row = i;
        p.start_time = w.start + w.offsets[i];
        p.window = window_index;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<RecoveredPacket> csi_gamp_window_detect(const WindowView& w, std::uint32_t packet_len,
                                                    double sigma2, const Constellation& cst,
                                                    const BigAmpOptions& opts,
                                                    std::uint32_t window_index) {
    const auto prior =
        EntryPriorX::sparse_uniform(gamma_prime(w.len, packet_len), cst);
    const BigAmpResult res = run_csi_gamp(w.observation, w.eff_channels, prior, sigma2, opts);

    // Entrywise hard decision over {0} union the alphabet, then packets are
    // read off the decided pattern alone: a row claims a span only when its
    // non-zero entries form exactly one full-length run. The i.i.d. prior
    // knows nothing about contiguity, so any support error voids the row.
    // Known channel leaves no scaling ambiguity (no head normalization).
    std::vector<RecoveredPacket> out;
    const std::size_t tp = w.len;
    for (std::size_t r = 0; r < res.x_mean.rows; ++r) {
        std::size_t first = tp, last = tp, nz = 0;
        std::vector<cplx> hard(tp);
        for (std::size_t t = 0; t < tp; ++t) {
            const cplx v = res.x_mean.get(r, t);
            const bool zero = res.x_zero(r, t) >= 0.5;
            hard[t] = zero ? cplx{} : cst.points[cst.nearest(v)];
            if (!zero) {
                if (nz == 0) first = t;
                last = t;
                ++nz;
            }
        }
        if (nz != packet_len) continue;       // wrong support size
        if (last - first + 1 != nz) continue; // holes in the run
        if (first + packet_len > tp) continue;
        std::vector<cplx> sym(hard.begin() + first, hard.begin() + first + packet_len);
        const auto payload = decode_ssl(sym, cst);
        if (!payload) continue;
        RecoveredPacket p;
        p.payload = *payload;
        p.row = r;
        p.trial = res.trial;
        p.start_time = w.start + static_cast<std::int64_t>(first);
        p.window = window_index;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<RecoveredPacket> sliding_detect_lmmse(const StreamScenario& scn,
                                                  const WindowSchedule& sched,
                                                  const Constellation& cst,
                                                  std::uint32_t num_users, double power) {
    const WindowDetector detect = [&](const WindowView& w, std::uint32_t widx) {
        return lmmse_window_detect(w, scn.packet_len, scn.sigma2, power, cst, widx);
    };
    return sliding_detect_with(scn, sched, num_users, detect);
}

std::vector<RecoveredPacket> sliding_detect_csi_gamp(const StreamScenario& scn,
                                                     const WindowSchedule& sched,
                                                     const Constellation& cst,
                                                     std::uint32_t num_users,
                                                     const BigAmpOptions& opts) {
    const WindowDetector detect = [&](const WindowView& w, std::uint32_t widx) {
        return csi_gamp_window_detect(w, scn.packet_len, scn.sigma2, cst, opts, widx);
    };
    return sliding_detect_with(scn, sched, num_users, detect);
}

} // namespace gfmud
