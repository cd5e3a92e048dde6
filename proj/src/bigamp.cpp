// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/bigamp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gfmud/kernels.hpp"
#include "gfmud/rng.hpp"

namespace gfmud {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-domain posterior merge for one entry. Shared by the public merge_x and
// the engine's batched loop so both produce identical numbers.
// out_masses has K+1 slots: [0] zero atom, [1..K] constellation atoms.
// log_atom holds log of the prior atom masses.
void merge_x_core(double rre, double rim, double inv_nur, const cplx* pts, std::size_t k,
                  double log_zero, const double* log_atom, double* out_masses, cplx& mean,
                  double& var) {
    double lmax = log_zero - (rre * rre + rim * rim) * inv_nur;
    out_masses[0] = lmax;
    for (std::size_t i = 0; i < k; ++i) {
        const double dr = pts[i].real() - rre;
        const double di = pts[i].imag() - rim;
        const double l = log_atom[i] - (dr * dr + di * di) * inv_nur;
        out_masses[i + 1] = l;
        if (l > lmax) lmax = l;
    }
    double w = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double e = std::exp(out_masses[i] - lmax);
        out_masses[i] = e;
        w += e;
    }
    const double inv_w = 1.0 / w;
    double mr = 0.0, mi = 0.0, e2 = 0.0;
    out_masses[0] *= inv_w;
    for (std::size_t i = 0; i < k; ++i) {
        const double p = out_masses[i + 1] * inv_w;
        out_masses[i + 1] = p;
        mr += p * pts[i].real();
        mi += p * pts[i].imag();
        e2 += p * (pts[i].real() * pts[i].real() + pts[i].imag() * pts[i].imag());
    }
    mean = {mr, mi};
    var = std::max(e2 - (mr * mr + mi * mi), 0.0);
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

} // namespace

EntryPriorX EntryPriorX::sparse_uniform(double gamma, const Constellation& cst) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("sparse_uniform: gamma outside [0, 1]");
    EntryPriorX p;
    p.zero_mass = 1.0 - gamma;
    p.points = cst.points;
    p.masses.assign(cst.size(), gamma / static_cast<double>(cst.size()));
    return p;
}

void EntryPriorX::validate() const {
    if (points.empty() || points.size() != masses.size())
        throw std::invalid_argument("prior_x: atom/mass size mismatch");
    double s = zero_mass;
    if (zero_mass < 0.0) throw std::invalid_argument("prior_x: negative zero mass");
    for (double m : masses) {
        if (m < 0.0) throw std::invalid_argument("prior_x: negative mass");
        s += m;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("prior_x: masses must sum to 1");
}

MarginalPosterior merge_x(cplx r_hat, double nu_r, const EntryPriorX& prior) {
    prior.validate();
    if (!(nu_r > 0.0)) throw std::invalid_argument("merge_x: nu_r must be positive");
    const std::size_t k = prior.points.size();
    std::vector<double> log_atom(k), masses(k + 1);
    for (std::size_t i = 0; i < k; ++i) log_atom[i] = safe_log(prior.masses[i]);
    MarginalPosterior out;
    merge_x_core(r_hat.real(), r_hat.imag(), 1.0 / nu_r, prior.points.data(), k,
                 safe_log(prior.zero_mass), log_atom.data(), masses.data(), out.mean, out.var);
    out.zero_mass = masses[0];
    out.point_masses.assign(masses.begin() + 1, masses.end());
    return out;
}

std::pair<cplx, double> merge_h(cplx q_hat, double nu_q, const EntryPriorH& prior) {
    if (!(prior.variance > 0.0)) throw std::invalid_argument("merge_h: prior variance <= 0");
    if (!(nu_q > 0.0)) throw std::invalid_argument("merge_h: nu_q must be positive");
    const double var = 1.0 / (1.0 / prior.variance + 1.0 / nu_q);
    return {q_hat * (var / nu_q), var};
}

PriorXGrid PriorXGrid::uniform(const EntryPriorX& p, std::size_t n, std::size_t t) {
    p.validate();
    PriorXGrid g;
    g.points = p.points;
    g.zero_mass = RMat(n, t, p.zero_mass);
    bool equal = true;
    for (std::size_t i = 1; i < p.masses.size(); ++i)
        if (std::abs(p.masses[i] - p.masses[0]) > 1e-15) equal = false;
    if (!equal) {
        g.atom_mass.reserve(p.masses.size());
        for (double m : p.masses) g.atom_mass.emplace_back(n, t, m);
    }
    return g;
}

EntryPriorX PriorXGrid::at(std::size_t n, std::size_t t) const {
    EntryPriorX p;
    p.points = points;
    p.zero_mass = zero_mass(n, t);
    const std::size_t k = points.size();
    p.masses.resize(k);
    if (atom_mass.empty()) {
        const double m = (1.0 - p.zero_mass) / static_cast<double>(k);
        std::fill(p.masses.begin(), p.masses.end(), m);
    } else {
        for (std::size_t i = 0; i < k; ++i) p.masses[i] = atom_mass[i](n, t);
    }
    return p;
}

struct BigAmpEngine::Impl {
    // Problem data.
    SplitMat y;
    std::size_t m = 0, n = 0, t = 0;
    double sigma2 = 0.0;
    double prior_h_var = 1.0;
    BigAmpOptions opts;
    PriorXGrid prior;
    bool known_h = false;

    struct State {
        SplitMat xhat, hhat, xbar, hbar, shat, rhat;
        RMat nux, nuh, nubarp, nup, nur, xzero;
        double cost = std::numeric_limits<double>::infinity();

        void init_shapes(std::size_t m, std::size_t n, std::size_t t) {
            xhat = SplitMat(n, t);
            xbar = SplitMat(n, t);
            rhat = SplitMat(n, t);
            nux = RMat(n, t);
            nur = RMat(n, t, 1.0);
            xzero = RMat(n, t);
            hhat = SplitMat(m, n);
            hbar = SplitMat(m, n);
            nuh = RMat(m, n);
            shat = SplitMat(m, t);
            nubarp = RMat(m, t);
            nup = RMat(m, t);
        }
        void swap(State& o) {
            std::swap(xhat, o.xhat);
            std::swap(hhat, o.hhat);
            std::swap(xbar, o.xbar);
            std::swap(hbar, o.hbar);
            std::swap(shat, o.shat);
            std::swap(rhat, o.rhat);
            std::swap(nux, o.nux);
            std::swap(nuh, o.nuh);
            std::swap(nubarp, o.nubarp);
            std::swap(nup, o.nup);
            std::swap(nur, o.nur);
            std::swap(xzero, o.xzero);
            std::swap(cost, o.cost);
        }
    };

    State s, c, best;

    // Scratch.
    RMat axh, ahh, axb, ahb, nus, gx, dx, gq, dh, nuq, raw_a, raw_b;
    SplitMat pbar, phat, sraw, hs, sx, qhat, z;
    std::vector<double> log_atom; // per-atom prior logs (general grid path)

    // Damping schedule. A candidate passes when its cost does not exceed the
    // worst of the last few accepted costs; the short window tolerates the
    // transient cost bumps typical of bilinear message passing.
    static constexpr std::size_t kCostWindow = 3;
    double step = 1.0;
    double recent_costs[kCostWindow] = {};
    std::size_t recent_count = 0;
    std::uint32_t accepted = 0;
    std::uint32_t attempts = 0;
    bool first = true;
    bool converged = false;
    bool diverged = false;
    double last_rel_change = std::numeric_limits<double>::infinity();

    double recent_max() const {
        double w = 0.0;
        for (std::size_t i = 0; i < recent_count; ++i) w = std::max(w, recent_costs[i]);
        return w;
    }
    void push_cost(double cost) {
        recent_costs[accepted % kCostWindow] = cost;
        if (recent_count < kCostWindow) ++recent_count;
    }

    double max_norm_dev = 0.0;
    bool finite_ok = true;
    std::vector<TracePoint> trace;

    void alloc() {
        s.init_shapes(m, n, t);
        c.init_shapes(m, n, t);
        axh = RMat(n, t);
        ahh = RMat(m, n);
        axb = RMat(n, t);
        ahb = RMat(m, n);
        nus = RMat(m, t);
        gx = RMat(n, t);
        dx = RMat(n, t);
        gq = RMat(m, n);
        dh = RMat(m, n);
        nuq = RMat(m, n);
        raw_a = RMat(m, t);
        raw_b = RMat(m, t);
        pbar = SplitMat(m, t);
        phat = SplitMat(m, t);
        sraw = SplitMat(m, t);
        hs = SplitMat(n, t);
        sx = SplitMat(m, n);
        qhat = SplitMat(m, n);
        z = SplitMat(m, t);
    }

    void check_prior(const PriorXGrid& p) const {
        if (p.points.empty()) throw std::invalid_argument("bigamp: empty atom set");
        if (p.zero_mass.rows != n || p.zero_mass.cols != t)
            throw std::invalid_argument("bigamp: prior grid shape mismatch");
        if (!p.atom_mass.empty() && p.atom_mass.size() != p.points.size())
            throw std::invalid_argument("bigamp: atom mass grid count mismatch");
        for (const auto& g : p.atom_mass)
            if (g.rows != n || g.cols != t)
                throw std::invalid_argument("bigamp: atom mass grid shape mismatch");
    }

    double prior_energy(std::size_t nn, std::size_t tt) const {
        double e = 0.0;
        const std::size_t k = prior.points.size();
        if (prior.atom_mass.empty()) {
            const double mass = (1.0 - prior.zero_mass(nn, tt)) / static_cast<double>(k);
            for (std::size_t i = 0; i < k; ++i) e += mass * std::norm(prior.points[i]);
        } else {
            for (std::size_t i = 0; i < k; ++i)
                e += prior.atom_mass[i](nn, tt) * std::norm(prior.points[i]);
        }
        return e;
    }

    void init_random(std::uint64_t seed) {
        Rng rng(seed);
        for (std::size_t i = 0; i < m * n; ++i) {
            const cplx h = rng.cgaussian(prior_h_var);
            s.hhat.re[i] = h.real();
            s.hhat.im[i] = h.imag();
            s.nuh.v[i] = prior_h_var;
        }
        for (std::size_t nn = 0; nn < n; ++nn) {
            for (std::size_t tt = 0; tt < t; ++tt) {
                const double e = std::max(prior_energy(nn, tt), 1e-3);
                const cplx x = rng.cgaussian(e);
                s.xhat.set(nn, tt, x);
                s.nux(nn, tt) = e;
            }
        }
        s.xbar = s.xhat;
        s.hbar = s.hhat;
        c.hhat = s.hhat; // overwritten in blind mode; load-bearing for known H
        c.hbar = s.hbar;
        c.nuh = s.nuh;
    }

    void init_known(const CMat& h) {
        s.hhat = SplitMat::from(h);
        s.hbar = s.hhat;
        s.nuh.fill(0.0);
        for (std::size_t nn = 0; nn < n; ++nn)
            for (std::size_t tt = 0; tt < t; ++tt) s.nux(nn, tt) = prior_energy(nn, tt);
        s.xbar = s.xhat; // zeros
        c.hhat = s.hhat;
        c.hbar = s.hbar;
        c.nuh = s.nuh;
        kernels::ops().abs2(ahb.data(), s.hbar.re.data(), s.hbar.im.data(), m * n);
    }

    // One full candidate iteration with damping factor `beta`, reading the
    // accepted state `s` and writing `c`. Also fills last_rel_change.
    void compute_candidate(double beta) {
        const auto& k = kernels::ops();
        const std::size_t mt = m * t, nt = n * t, mn = m * n;
        const double floor = opts.var_floor;

        // Plug-in output moments from the current means/variances.
        if (known_h) {
            k.rgemm(raw_a.data(), ahb.data(), s.nux.data(), m, n, t, false);
        } else {
            k.abs2(axh.data(), s.xhat.re.data(), s.xhat.im.data(), nt);
            k.abs2(ahh.data(), s.hhat.re.data(), s.hhat.im.data(), mn);
            k.rgemm(raw_a.data(), ahh.data(), s.nux.data(), m, n, t, false);
            k.rgemm(raw_a.data(), s.nuh.data(), axh.data(), m, n, t, true);
        }
        raw_b.v = raw_a.v;
        if (!known_h) k.rgemm(raw_b.data(), s.nuh.data(), s.nux.data(), m, n, t, true);
        k.blend(c.nubarp.data(), beta, raw_a.data(), s.nubarp.data(), mt);
        k.blend(c.nup.data(), beta, raw_b.data(), s.nup.data(), mt);
        k.clamp_min(c.nubarp.data(), floor, mt);
        k.clamp_min(c.nup.data(), floor, mt);

        k.cgemm(pbar.re.data(), pbar.im.data(), s.hhat.re.data(), s.hhat.im.data(),
                s.xhat.re.data(), s.xhat.im.data(), m, n, t);
        k.onsager(phat.re.data(), phat.im.data(), pbar.re.data(), pbar.im.data(),
                  s.shat.re.data(), s.shat.im.data(), c.nubarp.data(), mt);

        k.awgn_output(sraw.re.data(), sraw.im.data(), nus.data(), y.re.data(), y.im.data(),
                      phat.re.data(), phat.im.data(), c.nup.data(), sigma2, mt);
        k.blend(c.shat.re.data(), beta, sraw.re.data(), s.shat.re.data(), mt);
        k.blend(c.shat.im.data(), beta, sraw.im.data(), s.shat.im.data(), mt);

        // Damped means feed the pseudo-observation steps.
        k.blend(c.xbar.re.data(), beta, s.xhat.re.data(), s.xbar.re.data(), nt);
        k.blend(c.xbar.im.data(), beta, s.xhat.im.data(), s.xbar.im.data(), nt);
        if (!known_h) {
            k.blend(c.hbar.re.data(), beta, s.hhat.re.data(), s.hbar.re.data(), mn);
            k.blend(c.hbar.im.data(), beta, s.hhat.im.data(), s.hbar.im.data(), mn);
            k.abs2(ahb.data(), c.hbar.re.data(), c.hbar.im.data(), mn);
        }

        // Pseudo-observations for X.
        k.rgemm_at(gx.data(), ahb.data(), nus.data(), n, m, t, false);
        k.invert_floor(c.nur.data(), gx.data(), floor, nt);
        if (!known_h) k.rgemm_at(dx.data(), s.nuh.data(), nus.data(), n, m, t, false);
        k.cgemm_ah(hs.re.data(), hs.im.data(), c.hbar.re.data(), c.hbar.im.data(),
                   c.shat.re.data(), c.shat.im.data(), n, m, t);
        k.amp_pseudo(c.rhat.re.data(), c.rhat.im.data(), c.xbar.re.data(), c.xbar.im.data(),
                     c.nur.data(), dx.data(), hs.re.data(), hs.im.data(), nt);

        // Pseudo-observations for H and its conjugate merge.
        if (!known_h) {
            k.abs2(axb.data(), c.xbar.re.data(), c.xbar.im.data(), nt);
            k.rgemm_bt(gq.data(), nus.data(), axb.data(), m, t, n, false);
            k.clamp_min(gq.data(), floor, mn);
            k.invert_floor(nuq.data(), gq.data(), floor, mn);
            k.rgemm_bt(dh.data(), nus.data(), s.nux.data(), m, t, n, false);
            k.cgemm_bh(sx.re.data(), sx.im.data(), c.shat.re.data(), c.shat.im.data(),
                       c.xbar.re.data(), c.xbar.im.data(), m, t, n);
            k.amp_pseudo(qhat.re.data(), qhat.im.data(), c.hbar.re.data(), c.hbar.im.data(),
                         nuq.data(), dh.data(), sx.re.data(), sx.im.data(), mn);
            const double inv_prior = 1.0 / prior_h_var;
            for (std::size_t i = 0; i < mn; ++i) {
                const double var = 1.0 / (inv_prior + gq.v[i]);
                c.nuh.v[i] = var;
                const double g = var * gq.v[i]; // var / nu_q
                c.hhat.re[i] = qhat.re[i] * g;
                c.hhat.im[i] = qhat.im[i] * g;
            }
            k.clamp_min(c.nuh.data(), floor, mn);
        }

        // Posterior merge for X.
        merge_grid();
        k.clamp_min(c.nux.data(), floor, nt);

        // Residual cost of the candidate and relative change in X.
        k.cgemm(z.re.data(), z.im.data(), c.hhat.re.data(), c.hhat.im.data(), c.xhat.re.data(),
                c.xhat.im.data(), m, n, t);
        c.cost = k.sum_sq_diff(y.re.data(), y.im.data(), z.re.data(), z.im.data(), mt);

        const double dx2 = k.sum_sq_diff(c.xhat.re.data(), c.xhat.im.data(), s.xhat.re.data(),
                                         s.xhat.im.data(), nt);
        double xs2 = 0.0;
        for (std::size_t i = 0; i < nt; ++i)
            xs2 += s.xhat.re[i] * s.xhat.re[i] + s.xhat.im[i] * s.xhat.im[i];
        last_rel_change = std::sqrt(dx2 / std::max(xs2, 1e-300));
        if (!known_h) {
            // A saturated discrete prior can freeze X while H is still
            // refining; require both factors to settle before stopping.
            const double dh2 = k.sum_sq_diff(c.hhat.re.data(), c.hhat.im.data(), s.hhat.re.data(),
                                             s.hhat.im.data(), mn);
            double hs2 = 0.0;
            for (std::size_t i = 0; i < mn; ++i)
                hs2 += s.hhat.re[i] * s.hhat.re[i] + s.hhat.im[i] * s.hhat.im[i];
            last_rel_change = std::max(last_rel_change, std::sqrt(dh2 / std::max(hs2, 1e-300)));
        }

        if (opts.validate_numerics && !std::isfinite(c.cost)) finite_ok = false;
    }

    void merge_grid() {
        const std::size_t kk = prior.points.size();
        const bool uni = prior.atom_mass.empty();
        if (log_atom.size() < kk + 1) log_atom.resize(kk + 1);
        std::vector<double> masses(kk + 1);
        const double logk = std::log(static_cast<double>(kk));
        const std::size_t nt = n * t;
        for (std::size_t i = 0; i < nt; ++i) {
            const double zm = prior.zero_mass.v[i];
            double lz;
            if (uni) {
                lz = safe_log(zm);
                const double la = (zm < 1.0 ? std::log1p(-zm) : kNegInf) - logk;
                for (std::size_t a = 0; a < kk; ++a) log_atom[a] = la;
            } else {
                lz = safe_log(zm);
                for (std::size_t a = 0; a < kk; ++a)
                    log_atom[a] = safe_log(prior.atom_mass[a].v[i]);
            }
            cplx mean;
            double var;
            merge_x_core(c.rhat.re[i], c.rhat.im[i], 1.0 / c.nur.v[i], prior.points.data(), kk,
                         lz, log_atom.data(), masses.data(), mean, var);
            c.xhat.re[i] = mean.real();
            c.xhat.im[i] = mean.imag();
            c.nux.v[i] = var;
            c.xzero.v[i] = masses[0];
            if (opts.validate_numerics) {
                double sum = 0.0;
                for (std::size_t a = 0; a <= kk; ++a) sum += masses[a];
                const double dev = std::abs(sum - 1.0);
                if (dev > max_norm_dev) max_norm_dev = dev;
                if (!std::isfinite(mean.real()) || !std::isfinite(mean.imag()) ||
                    !std::isfinite(var))
                    finite_ok = false;
            }
        }
    }

    Stop run(std::uint32_t iters) {
        std::uint32_t done = 0;
        while (done < iters) {
            compute_candidate(step);
            const bool finite = std::isfinite(c.cost);
            const bool beyond = !finite || c.cost > opts.divergence_bound;
            const bool ok = !beyond && (first || c.cost <= recent_max());
            if (ok) {
                accept();
                ++done;
                step = std::min(step * opts.step_grow, opts.step_max);
                if (accepted >= 2 && last_rel_change < opts.tol) {
                    converged = true;
                    return Stop::converged;
                }
            } else if (step <= opts.step_min * (1.0 + 1e-12)) {
                if (beyond) {
                    diverged = true;
                    return Stop::diverged;
                }
                // Cannot shrink further: forced accept. The schedule restarts
                // from the initial step at most max_restart_attempts times;
                // after that the run continues at the minimum step.
                accept();
                ++done;
                if (attempts < opts.max_restart_attempts) {
                    ++attempts;
                    step = std::min(opts.step_init, opts.step_max);
                }
            } else {
                step = std::max(step * opts.step_shrink, opts.step_min);
            }
        }
        return Stop::iter_budget;
    }

    void accept() {
        s.swap(c);
        first = false;
        push_cost(s.cost);
        ++accepted;
        if (s.cost < best.cost) best = s;
        if (opts.collect_trace) trace.push_back({accepted, std::sqrt(s.cost), step});
    }

    BigAmpResult result() const {
        const State& b = best.cost <= s.cost ? best : s;
        BigAmpResult r;
        r.x_mean = b.xhat;
        r.x_var = b.nux;
        r.x_zero = b.xzero;
        r.h_mean = b.hhat;
        r.h_var = b.nuh;
        r.residual = std::sqrt(b.cost);
        r.iterations = accepted;
        r.converged = converged;
        r.diverged = diverged;
        r.restart_attempts = attempts;
        r.max_norm_dev = max_norm_dev;
        r.finite_ok = finite_ok;
        r.trace = trace;
        return r;
    }
};

BigAmpEngine::BigAmpEngine(const CMat& y, PriorXGrid prior_x, EntryPriorH prior_h, double sigma2,
                           const BigAmpOptions& opts, std::uint64_t seed)
    : impl_(new Impl) {
    if (!(prior_h.variance > 0.0)) throw std::invalid_argument("bigamp: prior_h variance <= 0");
    if (sigma2 < 0.0) throw std::invalid_argument("bigamp: negative noise variance");
    impl_->y = SplitMat::from(y);
    impl_->m = y.rows;
    impl_->t = y.cols;
    impl_->n = prior_x.zero_mass.rows;
    impl_->sigma2 = sigma2;
    impl_->prior_h_var = prior_h.variance;
    impl_->opts = opts;
    impl_->known_h = false;
    impl_->step = std::min(opts.step_init, opts.step_max);
    impl_->check_prior(prior_x);
    if (prior_x.zero_mass.cols != y.cols)
        throw std::invalid_argument("bigamp: prior grid T != observation T");
    impl_->prior = std::move(prior_x);
    impl_->alloc();
    impl_->init_random(seed);
}

BigAmpEngine::BigAmpEngine(const CMat& y, const CMat& h_known, PriorXGrid prior_x, double sigma2,
                           const BigAmpOptions& opts)
    : impl_(new Impl) {
    if (h_known.rows != y.rows) throw std::invalid_argument("bigamp: H rows != Y rows");
    if (sigma2 < 0.0) throw std::invalid_argument("bigamp: negative noise variance");
    impl_->y = SplitMat::from(y);
    impl_->m = y.rows;
    impl_->t = y.cols;
    impl_->n = h_known.cols;
    impl_->sigma2 = sigma2;
    impl_->opts = opts;
    impl_->known_h = true;
    impl_->step = std::min(opts.step_init, opts.step_max);
    impl_->check_prior(prior_x);
    if (prior_x.zero_mass.rows != h_known.cols || prior_x.zero_mass.cols != y.cols)
        throw std::invalid_argument("bigamp: prior grid shape mismatch");
    impl_->prior = std::move(prior_x);
    impl_->alloc();
    impl_->init_known(h_known);
}

BigAmpEngine::~BigAmpEngine() { delete impl_; }
BigAmpEngine::BigAmpEngine(BigAmpEngine&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
BigAmpEngine& BigAmpEngine::operator=(BigAmpEngine&& o) noexcept {
    std::swap(impl_, o.impl_);
    return *this;
}

void BigAmpEngine::set_prior_x(PriorXGrid prior) {
    impl_->check_prior(prior);
    impl_->prior = std::move(prior);
    impl_->step = std::min(impl_->opts.step_init, impl_->opts.step_max);
    impl_->recent_count = 0;
    impl_->first = true; // next candidate is accepted unconditionally
    impl_->converged = false;
    impl_->attempts = 0;  // fresh damping-restart budget for the new prior
}

void BigAmpEngine::seed_state(const CMat& x0, const RMat& nux0, const CMat& h0,
                              const RMat& nuh0) {
    auto& im = *impl_;
    if (x0.rows != im.n || x0.cols != im.t || h0.rows != im.m || h0.cols != im.n)
        throw std::invalid_argument("seed_state: shape mismatch");
    im.s.xhat = SplitMat::from(x0);
    im.s.xbar = im.s.xhat;
    im.s.nux = nux0;
    im.s.hhat = SplitMat::from(h0);
    im.s.hbar = im.s.hhat;
    im.s.nuh = nuh0;
    if (im.known_h)
        kernels::ops().abs2(im.ahb.data(), im.s.hbar.re.data(), im.s.hbar.im.data(),
                            im.m * im.n);
}

BigAmpEngine::Stop BigAmpEngine::run(std::uint32_t iters) { return impl_->run(iters); }
BigAmpResult BigAmpEngine::result() const { return impl_->result(); }
const RMat& BigAmpEngine::cur_x_zero() const { return impl_->s.xzero; }
const SplitMat& BigAmpEngine::cur_x_mean() const { return impl_->s.xhat; }
double BigAmpEngine::cur_residual() const { return std::sqrt(impl_->s.cost); }
std::uint32_t BigAmpEngine::restart_attempts() const { return impl_->attempts; }

std::vector<BigAmpResult> run_bigamp(const CMat& y, std::size_t n, const EntryPriorX& prior_x,
                                     EntryPriorH prior_h, double sigma2,
                                     const BigAmpOptions& opts) {
    prior_x.validate();
    if (opts.trials == 0) throw std::invalid_argument("run_bigamp: trials must be >= 1");
    std::vector<BigAmpResult> out;
    out.reserve(opts.trials);
    for (std::uint32_t r = 0; r < opts.trials; ++r) {
        BigAmpEngine eng(y, PriorXGrid::uniform(prior_x, n, y.cols), prior_h, sigma2, opts,
                         derive_seed(opts.seed, {r}));
        eng.run(opts.max_iters);
        BigAmpResult res = eng.result();
        res.trial = r;
        out.push_back(std::move(res));
    }
    return out;
}

BigAmpResult run_csi_gamp(const CMat& y, const CMat& h_known, const EntryPriorX& prior_x,
                          double sigma2, const BigAmpOptions& opts) {
    prior_x.validate();
    BigAmpEngine eng(y, h_known, PriorXGrid::uniform(prior_x, h_known.cols, y.cols), sigma2,
                     opts);
    eng.run(opts.max_iters);
    return eng.result();
}

const BigAmpResult& select_best(const std::vector<BigAmpResult>& results) {
    if (results.empty()) throw std::invalid_argument("select_best: no results");
    std::size_t best = 0;
    double best_res = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const double r = std::isfinite(results[i].residual)
                             ? results[i].residual
                             : std::numeric_limits<double>::infinity();
        if (r < best_res) {
            best_res = r;
            best = i;
        }
    }
    return results[best];
}

} // namespace gfmud
