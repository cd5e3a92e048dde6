// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "gfmud/bigamp.hpp"
#include "gfmud/codec.hpp"
#include "gfmud/rng.hpp"

using namespace gfmud;

namespace {

// Brute-force discrete posterior merge, straight probability domain.
MarginalPosterior merge_x_direct(cplx r, double nu, const EntryPriorX& prior) {
    const std::size_t k = prior.points.size();
    std::vector<double> w(k + 1);
    w[0] = prior.zero_mass * std::exp(-std::norm(r) / nu);
    for (std::size_t a = 0; a < k; ++a)
        w[a + 1] = prior.masses[a] * std::exp(-std::norm(r - prior.points[a]) / nu);
    double z = 0.0;
    for (const double x : w) z += x;
    MarginalPosterior p;
    p.zero_mass = w[0] / z;
    p.point_masses.resize(k);
    cplx mean{};
    for (std::size_t a = 0; a < k; ++a) {
        p.point_masses[a] = w[a + 1] / z;
        mean += prior.points[a] * p.point_masses[a];
    }
    p.mean = mean;
    double var = p.zero_mass * std::norm(mean);
    for (std::size_t a = 0; a < k; ++a)
        var += p.point_masses[a] * std::norm(prior.points[a] - mean);
    p.var = var;
    return p;
}

CMat random_cmat(std::size_t r, std::size_t c, Rng& rng, double var = 1.0) {
    CMat m(r, c);
    for (auto& x : m.v) x = rng.cgaussian(var);
    return m;
}

} // namespace

TEST_CASE("sparse uniform prior and validation") {
    const auto cst = Constellation::qpsk();
    const auto p = EntryPriorX::sparse_uniform(0.25, cst);
    CHECK(p.zero_mass == doctest::Approx(0.75));
    REQUIRE(p.masses.size() == 4);
    for (const double m : p.masses) CHECK(m == doctest::Approx(0.0625));
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.zero_mass = 0.9; // masses no longer sum to one
    CHECK_THROWS(bad.validate());
}

TEST_CASE("prior grid expansion round trips") {
    const auto cst = Constellation::qpsk();
    const auto p = EntryPriorX::sparse_uniform(0.3, cst);
    const auto g = PriorXGrid::uniform(p, 3, 5);
    CHECK(g.zero_mass.rows == 3);
    CHECK(g.zero_mass.cols == 5);
    CHECK(g.atom_mass.empty());
    const auto q = g.at(2, 4);
    CHECK(q.zero_mass == doctest::Approx(p.zero_mass));
    REQUIRE(q.masses.size() == p.masses.size());
    for (std::size_t a = 0; a < q.masses.size(); ++a)
        CHECK(q.masses[a] == doctest::Approx(p.masses[a]));
}

TEST_CASE("posterior merge matches the direct evaluation") {
    const auto cst = Constellation::qpsk();
    Rng rng(29);
    for (int i = 0; i < 1000; ++i) {
        EntryPriorX prior;
        prior.points = cst.points;
        const double g = 0.05 + 0.9 * rng.uniform();
        prior.zero_mass = 1.0 - g;
        prior.masses.assign(4, g / 4);
        if (i % 3 == 0) {
            // Non-uniform atom masses.
            double s = 0.0;
            for (auto& m : prior.masses) s += (m = rng.uniform() + 1e-3);
            for (auto& m : prior.masses) m *= g / s;
        }
        const cplx r = rng.cgaussian(2.0);
        const double nu = 0.05 + 2.0 * rng.uniform();
        const auto a = merge_x(r, nu, prior);
        const auto b = merge_x_direct(r, nu, prior);
        CHECK(std::abs(a.zero_mass - b.zero_mass) < 1e-9);
        CHECK(std::abs(a.mean - b.mean) < 1e-9);
        CHECK(std::abs(a.var - b.var) < 1e-9);
        double sum = a.zero_mass;
        for (const double m : a.point_masses) sum += m;
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("posterior merge survives extreme pseudo-observations") {
    const auto cst = Constellation::qpsk();
    const auto prior = EntryPriorX::sparse_uniform(0.25, cst);
    for (const cplx r : {cplx{1e8, -1e8}, cplx{-300, 0}, cplx{0, 0}}) {
        for (const double nu : {1e-12, 1e-3, 1e6}) {
            const auto p = merge_x(r, nu, prior);
            CHECK(std::isfinite(p.mean.real()));
            CHECK(std::isfinite(p.mean.imag()));
            CHECK(std::isfinite(p.var));
            double sum = p.zero_mass;
            for (const double m : p.point_masses) sum += m;
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("gaussian channel merge is the conjugate update") {
    EntryPriorH prior;
    prior.variance = 1.7;
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const cplx q = rng.cgaussian(1.0);
        const double nu = 0.01 + rng.uniform();
        const auto [mean, var] = merge_h(q, nu, prior);
        const double k = prior.variance / (prior.variance + nu);
        CHECK(std::abs(mean - k * q) < 1e-12);
        CHECK(var == doctest::Approx(k * nu).epsilon(1e-12));
    }
}

TEST_CASE("known-channel mode solves an easy sparse problem") {
    const auto cst = Constellation::qpsk();
    Rng rng(37);
    const std::size_t m = 8, n = 3, t = 48;
    const auto h = random_cmat(m, n, rng);
    CMat x(n, t);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < t; ++c)
            if (rng.bernoulli(0.25)) x(r, c) = cst.points[rng.below(4)];
    const double sigma2 = 1e-6;
    CMat y(m, t);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < t; ++c) {
            cplx acc = rng.cgaussian(sigma2);
            for (std::size_t r = 0; r < n; ++r) acc += h(i, r) * x(r, c);
            y(i, c) = acc;
        }
    BigAmpOptions opts;
    opts.max_iters = 60;
    const auto res = run_csi_gamp(y, h, EntryPriorX::sparse_uniform(0.25, cst), sigma2, opts);
    CHECK(res.finite_ok);
    CHECK_FALSE(res.diverged);
    // Hard decisions reproduce X exactly; no scaling ambiguity with known H.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < t; ++c) {
            const cplx est = res.x_zero(r, c) >= 0.5
                                 ? cplx{}
                                 : cst.points[cst.nearest(res.x_mean.get(r, c))];
            CHECK(std::abs(est - x(r, c)) < 1e-6);
        }
}

TEST_CASE("blind mode keeps the true factorization as a fixed point") {
    const auto cst = Constellation::qpsk();
    Rng rng(41);
    const std::size_t m = 8, n = 2, t = 64;
    const auto h = random_cmat(m, n, rng);
    CMat x(n, t);
    for (std::size_t r = 0; r < n; ++r) {
        x(r, 0) = cst.reference();
        for (std::size_t c = 1; c < t; ++c)
            if (rng.bernoulli(0.3)) x(r, c) = cst.points[rng.below(4)];
    }
    const double sigma2 = 1e-8;
    CMat y(m, t);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < t; ++c) {
            cplx acc = rng.cgaussian(sigma2);
            for (std::size_t r = 0; r < n; ++r) acc += h(i, r) * x(r, c);
            y(i, c) = acc;
        }
    BigAmpOptions opts;
    opts.max_iters = 50;
    const auto grid = PriorXGrid::uniform(EntryPriorX::sparse_uniform(0.3, cst), n, t);
    BigAmpEngine eng(y, grid, EntryPriorH{1.0}, sigma2, opts, 7);
    RMat nux(n, t, 1e-6), nuh(m, n, 1e-6);
    eng.seed_state(x, nux, h, nuh);
    eng.run(opts.max_iters);
    const auto res = eng.result();
    CHECK(res.residual < 1e-2);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < t; ++c)
            CHECK(std::abs(res.x_mean.get(r, c) - x(r, c)) < 1e-3);
}

TEST_CASE("blind recovery lands in the scaling ambiguity class") {
    const auto cst = Constellation::qpsk();
    Rng rng(43);
    const std::size_t m = 12, n = 1, t = 96;
    const auto h = random_cmat(m, n, rng);
    CMat x(n, t);
    x(0, 0) = cst.reference();
    for (std::size_t c = 1; c < t; ++c)
        if (rng.bernoulli(0.3)) x(0, c) = cst.points[rng.below(4)];
    const double sigma2 = 1e-7;
    CMat y(m, t);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < t; ++c) {
            cplx acc = rng.cgaussian(sigma2);
            acc += h(i, 0) * x(0, c);
            y(i, c) = acc;
        }
    BigAmpOptions opts;
    opts.max_iters = 100;
    opts.trials = 4;
    opts.seed = 11;
    const auto runs = run_bigamp(y, n, EntryPriorX::sparse_uniform(0.3, cst), EntryPriorH{1.0},
                                 sigma2, opts);
    REQUIRE(runs.size() == 4);
    for (std::size_t i = 0; i < runs.size(); ++i) CHECK(runs[i].trial == i);
    const auto& best = select_best(runs);
    // The residual cannot drop below the noise energy in the observation.
    const double floor = std::sqrt(static_cast<double>(m) * t * sigma2);
    CHECK(best.residual < 5.0 * floor);
    // The estimate matches a * x for one scaling-set member a.
    double best_err = 1e9;
    for (const auto& a : cst.scaling) {
        double err = 0.0;
        for (std::size_t c = 0; c < t; ++c)
            err = std::max(err, std::abs(best.x_mean.get(0, c) - a * x(0, c)));
        best_err = std::min(best_err, err);
    }
    CHECK(best_err < 1e-3);
}

TEST_CASE("select_best ties resolve to the lowest trial") {
    std::vector<BigAmpResult> rs(3);
    rs[0].residual = 2.0;
    rs[0].trial = 0;
    rs[1].residual = 1.0;
    rs[1].trial = 1;
    rs[2].residual = 1.0;
    rs[2].trial = 2;
    CHECK(select_best(rs).trial == 1);
}

TEST_CASE("divergence is flagged and capped restarts do not abort") {
    const auto cst = Constellation::qpsk();
    Rng rng(47);
    const std::size_t m = 4, n = 2, t = 16;
    auto y = random_cmat(m, t, rng, 1.0);
    for (auto& v : y.v) v *= 1e6; // unexplainable under the unit prior
    BigAmpOptions opts;
    opts.max_iters = 80;
    opts.divergence_bound = 1e3;
    opts.seed = 1;
    const auto runs =
        run_bigamp(y, n, EntryPriorX::sparse_uniform(0.25, cst), EntryPriorH{1.0}, 1e-3, opts);
    CHECK(runs[0].diverged);

    // Same data, default bound: runs to the budget, restarts stay capped.
    opts.divergence_bound = 1e30;
    const auto ok = run_bigamp(y, n, EntryPriorX::sparse_uniform(0.25, cst), EntryPriorH{1.0},
                               1e-3, opts);
    CHECK_FALSE(ok[0].diverged);
    CHECK(ok[0].restart_attempts <= opts.max_restart_attempts);
    CHECK(ok[0].iterations > 0);
}

TEST_CASE("numerical hygiene on a logged run") {
    const auto cst = Constellation::qpsk();
    Rng rng(53);
    const std::size_t m = 8, n = 3, t = 32;
    const auto h = random_cmat(m, n, rng);
    CMat x(n, t);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < t; ++c)
            if (rng.bernoulli(0.25)) x(r, c) = cst.points[rng.below(4)];
    const double sigma2 = 0.05;
    CMat y(m, t);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < t; ++c) {
            cplx acc = rng.cgaussian(sigma2);
            for (std::size_t r = 0; r < n; ++r) acc += h(i, r) * x(r, c);
            y(i, c) = acc;
        }
    BigAmpOptions opts;
    opts.max_iters = 100;
    opts.validate_numerics = true;
    opts.collect_trace = true;
    opts.seed = 3;
    const auto runs =
        run_bigamp(y, n, EntryPriorX::sparse_uniform(0.25, cst), EntryPriorH{1.0}, sigma2, opts);
    CHECK(runs[0].finite_ok);
    CHECK(runs[0].max_norm_dev < 1e-9);
    CHECK(!runs[0].trace.empty());
    for (const auto& p : runs[0].trace) CHECK(std::isfinite(p.residual));
}

TEST_CASE("runs are deterministic in the seed") {
    const auto cst = Constellation::qpsk();
    Rng rng(59);
    const auto y = random_cmat(6, 24, rng);
    BigAmpOptions opts;
    opts.max_iters = 30;
    opts.seed = 21;
    const auto a =
        run_bigamp(y, 2, EntryPriorX::sparse_uniform(0.25, cst), EntryPriorH{1.0}, 0.1, opts);
    const auto b =
        run_bigamp(y, 2, EntryPriorX::sparse_uniform(0.25, cst), EntryPriorH{1.0}, 0.1, opts);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].residual == b[i].residual);
        CHECK(a[i].iterations == b[i].iterations);
        for (std::size_t j = 0; j < a[i].x_mean.size(); ++j) {
            CHECK(a[i].x_mean.re[j] == b[i].x_mean.re[j]);
            CHECK(a[i].x_mean.im[j] == b[i].x_mean.im[j]);
        }
    }
}
