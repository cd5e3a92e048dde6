// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/rsl.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace gfmud {

CMat soft_threshold(const SplitMat& x_mean, double eps) {
    CMat out(x_mean.rows, x_mean.cols);
    for (std::size_t i = 0; i < x_mean.size(); ++i) {
        const cplx v{x_mean.re[i], x_mean.im[i]};
        out.v[i] = std::abs(v) >= eps ? v : cplx{};
    }
    return out;
}

std::optional<std::vector<cplx>> phase_correct(const std::vector<cplx>& row, cplx x0) {
    std::size_t tau = row.size();
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] != cplx{}) {
            tau = i;
            break;
        }
    }
    if (tau == row.size()) return std::nullopt;
    const cplx g = x0 / row[tau];
    std::vector<cplx> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = row[i] * g;
    return out;
}

cplx hard_decide(cplx x, const Constellation& cst) {
    if (x == cplx{}) return x;
    return cst.points[cst.nearest(x)];
}

std::vector<RecoveredPacket> detect_slot(const CMat& y, double sigma2,
                                         const RslDetectorConfig& det,
                                         const RslCodecConfig& codec, const Constellation& cst) {
    if (det.num_active == 0) throw std::invalid_argument("detect_slot: num_active must be >= 1");
    if (det.restarts == 0) throw std::invalid_argument("detect_slot: restarts must be >= 1");
    const EntryPriorX prior = EntryPriorX::sparse_uniform(det.sparsity, cst);
    BigAmpOptions opts = det.bigamp;
    opts.trials = det.restarts;
    const auto results = run_bigamp(y, det.num_active, prior, det.prior_h, sigma2, opts);

    std::vector<RecoveredPacket> out;
    std::set<Bits> seen;
    for (const auto& res : results) {
        const CMat xs = soft_threshold(res.x_mean, det.zero_threshold);
        for (std::size_t r = 0; r < xs.rows; ++r) {
            std::vector<cplx> row(&xs(r, 0), &xs(r, 0) + xs.cols);
            const auto corrected = phase_correct(row, cst.reference());
            if (!corrected) continue;
            std::vector<cplx> hard(corrected->size());
            for (std::size_t i = 0; i < hard.size(); ++i)
                hard[i] = hard_decide((*corrected)[i], cst);
            const auto payload = decode_rsl(hard, codec, cst);
            if (!payload) continue;
            if (!seen.insert(*payload).second) continue;
            RecoveredPacket p;
            p.user_id = user_id_from_payload(*payload, codec.num_users);
            p.payload = *payload;
            p.row = r;
            p.trial = res.trial;
            out.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace gfmud
