// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/ssl.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

#include "gfmud/rng.hpp"

namespace gfmud {

void WindowSchedule::validate(std::uint32_t packet_len) const {
    if (window_len < packet_len)
        throw std::invalid_argument("window schedule: window shorter than packet");
    if (step == 0) throw std::invalid_argument("window schedule: step must be >= 1");
    if (step > window_len - packet_len + 1)
        throw std::invalid_argument("window schedule: step leaves uncovered starts");
}

std::vector<std::int64_t> WindowSchedule::starts(std::int64_t duration) const {
    std::vector<std::int64_t> out;
    for (std::int64_t t0 = 0; t0 + window_len <= duration; t0 += step) out.push_back(t0);
    return out;
}

std::vector<PositionedRow> position_rows(const RMat& x_zero, std::uint32_t packet_len) {
    const std::size_t tp = x_zero.cols;
    if (packet_len == 0 || packet_len > tp)
        throw std::invalid_argument("position_rows: bad packet length");
    std::vector<PositionedRow> out;
    out.reserve(x_zero.rows);
    std::vector<IndicatorMessage> row(tp);
    for (std::size_t r = 0; r < x_zero.rows; ++r) {
        for (std::size_t t = 0; t < tp; ++t) {
            const double p1 = 1.0 - x_zero(r, t);
            row[t].p1 = p1 < 0.0 ? 0.0 : (p1 > 1.0 ? 1.0 : p1);
        }
        const OffsetPosterior post = offset_distribution(row, packet_len);
        PositionedRow pr;
        pr.row = r;
        pr.offset = post.argmax();
        pr.mass = post.probs[static_cast<std::size_t>(pr.offset - post.min_offset)];
        pr.is_type1 = pr.offset >= 0 &&
                      pr.offset <= static_cast<std::int64_t>(tp) -
                                       static_cast<std::int64_t>(packet_len);
        out.push_back(pr);
    }
    return out;
}

std::vector<RecoveredPacket> recover_type1(const SplitMat& x_mean,
                                           const std::vector<PositionedRow>& positioned,
                                           std::uint32_t packet_len, const Constellation& cst,
                                           std::int64_t window_start, std::uint32_t window_index,
                                           double norm_floor) {
    std::vector<RecoveredPacket> out;
    for (const auto& pr : positioned) {
        if (!pr.is_type1) continue;
        const auto off = static_cast<std::size_t>(pr.offset);
        const cplx head = x_mean.get(pr.row, off);
        if (std::abs(head) < norm_floor) continue;
        // The head pilot seeds the scalar ambiguity; decision-directed passes
        // refit it over the whole span so one noisy entry cannot sink the row.
        cplx amb = head / cst.reference();
        std::vector<cplx> sym(packet_len);
        sym[0] = cst.reference();
        for (int pass = 0; pass < 3; ++pass) {
            for (std::uint32_t j = 1; j < packet_len; ++j) {
                const cplx v = x_mean.get(pr.row, off + j) / amb;
                sym[j] = cst.points[cst.nearest(v)];
            }
            cplx num = 0.0;
            double den = 0.0;
            for (std::uint32_t j = 0; j < packet_len; ++j) {
                num += std::conj(sym[j]) * x_mean.get(pr.row, off + j);
                den += std::norm(sym[j]);
            }
            if (!(den > 0.0) || std::abs(num) < norm_floor) break;
            const cplx next = num / den;
            const bool settled = std::abs(next - amb) <= 1e-9 * std::abs(amb);
            amb = next;
            if (settled) break;
        }
        for (std::uint32_t j = 1; j < packet_len; ++j) {
            const cplx v = x_mean.get(pr.row, off + j) / amb;
            sym[j] = cst.points[cst.nearest(v)];
        }
        const auto payload = decode_ssl(sym, cst);
        if (!payload) continue;
        RecoveredPacket p;
        p.payload = *payload;
        p.row = pr.row;
        p.start_time = window_start + pr.offset;
        p.window = window_index;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<RecoveredPacket> sliding_detect_with(const StreamScenario& scn,
                                                 const WindowSchedule& sched,
                                                 std::uint32_t num_users,
                                                 const WindowDetector& detect,
                                                 std::ostream* window_log) {
    sched.validate(scn.packet_len);

    struct Claim {
        RecoveredPacket p;
        std::int64_t interior = 0;
    };
    std::vector<Claim> claims;

    const auto starts = sched.starts(scn.duration);
    for (std::size_t widx = 0; widx < starts.size(); ++widx) {
        const std::int64_t t0 = starts[widx];
        const WindowView w = extract_window(scn, t0, sched.window_len);
        std::vector<RecoveredPacket> recs;
        if (w.count() > 0) recs = detect(w, static_cast<std::uint32_t>(widx));
        if (window_log) {
            nlohmann::json j;
            j["window"] = widx;
            j["start"] = t0;
            j["true_count"] = w.count();
            j["claims"] = recs.size();
            *window_log << j.dump() << "\n";
        }
        for (auto& r : recs) {
            Claim c;
            const std::int64_t head = r.start_time - t0;
            const std::int64_t tail = (t0 + sched.window_len) - (r.start_time + scn.packet_len);
            c.interior = std::min(head, tail);
            c.p = std::move(r);
            claims.push_back(std::move(c));
        }
    }

    // Pass 1: identical (payload, start) across windows -> most interior copy.
    std::map<std::pair<std::int64_t, Bits>, std::size_t> by_payload;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        const auto key = std::make_pair(claims[i].p.start_time, claims[i].p.payload);
        const auto it = by_payload.find(key);
        if (it == by_payload.end())
            by_payload.emplace(key, i);
        else if (claims[i].interior > claims[it->second].interior)
            it->second = i;
    }
    // Pass 2: claims sharing (user id, start) but disagreeing in payload are
    // competing estimates of one transmission -> most interior copy. Claims
    // whose id field is out of range keep payload-level dedup only. Distinct
    // users at the same start survive independently.
    std::map<std::pair<std::int64_t, std::uint32_t>, std::size_t> by_user;
    std::vector<std::size_t> keep;
    for (const auto& [key, idx] : by_payload) {
        const auto uid = user_id_from_payload(claims[idx].p.payload, num_users);
        claims[idx].p.user_id = uid;
        if (!uid) {
            keep.push_back(idx);
            continue;
        }
        const auto ukey = std::make_pair(claims[idx].p.start_time, *uid);
        const auto it = by_user.find(ukey);
        if (it == by_user.end())
            by_user.emplace(ukey, idx);
        else if (claims[idx].interior > claims[it->second].interior)
            it->second = idx;
    }
    for (const auto& [ukey, idx] : by_user) keep.push_back(idx);

    std::vector<RecoveredPacket> out;
    out.reserve(keep.size());
    for (std::size_t idx : keep) out.push_back(std::move(claims[idx].p));
    std::sort(out.begin(), out.end(), [](const RecoveredPacket& a, const RecoveredPacket& b) {
        if (a.start_time != b.start_time) return a.start_time < b.start_time;
        return a.payload < b.payload;
    });
    return out;
}

std::vector<RecoveredPacket> sliding_detect(const StreamScenario& scn,
                                            const WindowSchedule& sched,
                                            const Constellation& cst,
                                            const SslDetectorOptions& opts) {
    const WindowDetector detect = [&](const WindowView& w, std::uint32_t widx) {
        BigAmpOptions bopts = opts.bigamp;
        bopts.seed = derive_seed(opts.bigamp.seed, {widx});
        const std::size_t rows = w.count() + opts.extra_rows;
        BigAmpResult res = run_turbo(w.observation, rows, scn.packet_len, opts.prior_h,
                                     scn.sigma2, cst, opts.turbo, bopts);
        const auto positioned = position_rows(res.x_zero, scn.packet_len);
        auto recs = recover_type1(res.x_mean, positioned, scn.packet_len, cst, w.start, widx);
        for (auto& r : recs) r.trial = res.trial;
        return recs;
    };
    return sliding_detect_with(scn, sched, opts.num_users, detect, opts.window_log);
}

} // namespace gfmud
