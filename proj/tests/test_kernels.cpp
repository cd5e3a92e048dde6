// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "gfmud/kernels.hpp"
#include "gfmud/rng.hpp"

using namespace gfmud;
using kernels::Ops;

namespace {

std::vector<double> randv(std::size_t n, Rng& rng, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

constexpr double kTol = 1e-11;

// Sizes straddle the vector width (4 doubles) and include remainders.
const std::size_t kDims[][3] = {
    {1, 1, 1}, {2, 3, 5}, {4, 4, 4}, {5, 7, 9}, {8, 16, 12}, {13, 21, 17}, {16, 33, 31},
};

} // namespace

TEST_CASE("avx2 backend is present on this machine") {
    // The suite below degenerates to scalar-vs-scalar when AVX2 is absent;
    // flag that visibly instead of passing vacuously.
    WARN_MESSAGE(kernels::avx2_ops() != nullptr, "no AVX2 backend, equivalence checks vacuous");
}

TEST_CASE("real gemm variants match across backends") {
    const Ops& s = kernels::scalar_ops();
    const Ops* vp = kernels::avx2_ops();
    if (!vp) return;
    const Ops& v = *vp;
    Rng rng(17);
    for (const auto& d : kDims) {
        const std::size_t m = d[0], k = d[1], n = d[2];
        const auto a = randv(m * k, rng);
        const auto b = randv(k * n, rng);
        const auto at = randv(k * m, rng);
        const auto bt = randv(n * k, rng);
        for (bool acc : {false, true}) {
            auto c0 = randv(m * n, rng);
            auto c1 = c0;
            s.rgemm(c0.data(), a.data(), b.data(), m, k, n, acc);
            v.rgemm(c1.data(), a.data(), b.data(), m, k, n, acc);
            CHECK(max_abs_diff(c0, c1) < kTol);

            s.rgemm_at(c0.data(), at.data(), b.data(), m, k, n, acc);
            v.rgemm_at(c1.data(), at.data(), b.data(), m, k, n, acc);
            CHECK(max_abs_diff(c0, c1) < kTol);

            s.rgemm_bt(c0.data(), a.data(), bt.data(), m, k, n, acc);
            v.rgemm_bt(c1.data(), a.data(), bt.data(), m, k, n, acc);
            CHECK(max_abs_diff(c0, c1) < kTol);
        }
    }
}

TEST_CASE("complex gemm variants match across backends") {
    const Ops& s = kernels::scalar_ops();
    const Ops* vp = kernels::avx2_ops();
    if (!vp) return;
    const Ops& v = *vp;
    Rng rng(23);
    for (const auto& d : kDims) {
        const std::size_t m = d[0], k = d[1], n = d[2];
        const auto are = randv(m * k, rng), aim = randv(m * k, rng);
        const auto bre = randv(k * n, rng), bim = randv(k * n, rng);
        const auto atre = randv(k * m, rng), atim = randv(k * m, rng);
        const auto btre = randv(n * k, rng), btim = randv(n * k, rng);
        std::vector<double> c0re(m * n), c0im(m * n), c1re(m * n), c1im(m * n);

        s.cgemm(c0re.data(), c0im.data(), are.data(), aim.data(), bre.data(), bim.data(), m, k, n);
        v.cgemm(c1re.data(), c1im.data(), are.data(), aim.data(), bre.data(), bim.data(), m, k, n);
        CHECK(max_abs_diff(c0re, c1re) < kTol);
        CHECK(max_abs_diff(c0im, c1im) < kTol);

        s.cgemm_ah(c0re.data(), c0im.data(), atre.data(), atim.data(), bre.data(), bim.data(), m,
                   k, n);
        v.cgemm_ah(c1re.data(), c1im.data(), atre.data(), atim.data(), bre.data(), bim.data(), m,
                   k, n);
        CHECK(max_abs_diff(c0re, c1re) < kTol);
        CHECK(max_abs_diff(c0im, c1im) < kTol);

        s.cgemm_bh(c0re.data(), c0im.data(), are.data(), aim.data(), btre.data(), btim.data(), m,
                   k, n);
        v.cgemm_bh(c1re.data(), c1im.data(), are.data(), aim.data(), btre.data(), btim.data(), m,
                   k, n);
        CHECK(max_abs_diff(c0re, c1re) < kTol);
        CHECK(max_abs_diff(c0im, c1im) < kTol);
    }
}

TEST_CASE("elementwise kernels match across backends") {
    const Ops& s = kernels::scalar_ops();
    const Ops* vp = kernels::avx2_ops();
    if (!vp) return;
    const Ops& v = *vp;
    Rng rng(31);
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{17},
                          std::size_t{64}, std::size_t{129}}) {
        const auto re = randv(n, rng), im = randv(n, rng);
        const auto xn = randv(n, rng), xo = randv(n, rng);
        auto nu = randv(n, rng);
        for (auto& x : nu) x = std::abs(x) + 1e-3;
        const auto g = randv(n, rng);
        std::vector<double> o0(n), o1(n);

        s.abs2(o0.data(), re.data(), im.data(), n);
        v.abs2(o1.data(), re.data(), im.data(), n);
        CHECK(max_abs_diff(o0, o1) < kTol);

        s.blend(o0.data(), 0.37, xn.data(), xo.data(), n);
        v.blend(o1.data(), 0.37, xn.data(), xo.data(), n);
        CHECK(max_abs_diff(o0, o1) < kTol);

        std::vector<double> p0re(n), p0im(n), p1re(n), p1im(n);
        s.onsager(p0re.data(), p0im.data(), re.data(), im.data(), xn.data(), xo.data(), nu.data(),
                  n);
        v.onsager(p1re.data(), p1im.data(), re.data(), im.data(), xn.data(), xo.data(), nu.data(),
                  n);
        CHECK(max_abs_diff(p0re, p1re) < kTol);
        CHECK(max_abs_diff(p0im, p1im) < kTol);

        std::vector<double> s0re(n), s0im(n), n0(n), s1re(n), s1im(n), n1(n);
        s.awgn_output(s0re.data(), s0im.data(), n0.data(), re.data(), im.data(), xn.data(),
                      xo.data(), nu.data(), 0.21, n);
        v.awgn_output(s1re.data(), s1im.data(), n1.data(), re.data(), im.data(), xn.data(),
                      xo.data(), nu.data(), 0.21, n);
        CHECK(max_abs_diff(s0re, s1re) < kTol);
        CHECK(max_abs_diff(s0im, s1im) < kTol);
        CHECK(max_abs_diff(n0, n1) < kTol);

        s.amp_pseudo(p0re.data(), p0im.data(), re.data(), im.data(), nu.data(), g.data(),
                     xn.data(), xo.data(), n);
        v.amp_pseudo(p1re.data(), p1im.data(), re.data(), im.data(), nu.data(), g.data(),
                     xn.data(), xo.data(), n);
        CHECK(max_abs_diff(p0re, p1re) < kTol);
        CHECK(max_abs_diff(p0im, p1im) < kTol);

        s.invert_floor(o0.data(), nu.data(), 1e-2, n);
        v.invert_floor(o1.data(), nu.data(), 1e-2, n);
        CHECK(max_abs_diff(o0, o1) < kTol);

        auto x0 = xn, x1 = xn;
        s.clamp_min(x0.data(), 0.1, n);
        v.clamp_min(x1.data(), 0.1, n);
        CHECK(max_abs_diff(x0, x1) < kTol);

        const double d0 = s.sum_sq_diff(re.data(), im.data(), xn.data(), xo.data(), n);
        const double d1 = v.sum_sq_diff(re.data(), im.data(), xn.data(), xo.data(), n);
        CHECK(std::abs(d0 - d1) <= kTol * std::max(1.0, std::abs(d0)));
    }
}

TEST_CASE("scalar reference gemm is exact on a hand case") {
    // [1 2; 3 4] * [5 6; 7 8] = [19 22; 43 50]
    const double a[] = {1, 2, 3, 4};
    const double b[] = {5, 6, 7, 8};
    double c[4] = {};
    kernels::scalar_ops().rgemm(c, a, b, 2, 2, 2, false);
    CHECK(c[0] == doctest::Approx(19));
    CHECK(c[1] == doctest::Approx(22));
    CHECK(c[2] == doctest::Approx(43));
    CHECK(c[3] == doctest::Approx(50));
    kernels::scalar_ops().rgemm(c, a, b, 2, 2, 2, true);
    CHECK(c[3] == doctest::Approx(100));
}

TEST_CASE("backend selection is sticky and reversible") {
    const auto before = kernels::active_backend();
    REQUIRE(kernels::set_backend(kernels::Backend::scalar));
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(kernels::backend_name(kernels::Backend::scalar) == "scalar");
    CHECK(kernels::backend_name(kernels::Backend::avx2) == "avx2");
    if (kernels::backend_available(kernels::Backend::avx2)) {
        REQUIRE(kernels::set_backend(kernels::Backend::avx2));
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
    } else {
        CHECK_FALSE(kernels::set_backend(kernels::Backend::avx2));
        CHECK(kernels::active_backend() == kernels::Backend::scalar);
    }
    kernels::set_backend(before);
}
