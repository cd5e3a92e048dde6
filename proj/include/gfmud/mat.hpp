// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gfmud {

using cplx = std::complex<double>;

// Dense row-major real matrix.
struct RMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    RMat() = default;
    RMat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    std::size_t size() const { return v.size(); }
    void fill(double x) { v.assign(v.size(), x); }
};

// Dense row-major complex matrix (interleaved storage).
struct CMat {
    std::size_t rows = 0, cols = 0;
    std::vector<cplx> v;

    CMat() = default;
    CMat(std::size_t r, std::size_t c, cplx fill = {}) : rows(r), cols(c), v(r * c, fill) {}

    cplx& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    cplx* data() { return v.data(); }
    const cplx* data() const { return v.data(); }
    std::size_t size() const { return v.size(); }
    void fill(cplx x) { v.assign(v.size(), x); }
};

// Complex matrix in split real/imaginary planes; this is the layout the
// vectorized kernels operate on.
struct SplitMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> re, im;

    SplitMat() = default;
    SplitMat(std::size_t r, std::size_t c) : rows(r), cols(c), re(r * c, 0.0), im(r * c, 0.0) {}

    cplx get(std::size_t r, std::size_t c) const {
        const std::size_t i = r * cols + c;
        return {re[i], im[i]};
    }
    void set(std::size_t r, std::size_t c, cplx z) {
        const std::size_t i = r * cols + c;
        re[i] = z.real();
        im[i] = z.imag();
    }
    std::size_t size() const { return re.size(); }
    void fill(cplx z) {
        re.assign(re.size(), z.real());
        im.assign(im.size(), z.imag());
    }

    static SplitMat from(const CMat& a) {
        SplitMat s(a.rows, a.cols);
        for (std::size_t i = 0; i < a.size(); ++i) {
            s.re[i] = a.v[i].real();
            s.im[i] = a.v[i].imag();
        }
        return s;
    }
    CMat to_cmat() const {
        CMat a(rows, cols);
        for (std::size_t i = 0; i < a.size(); ++i) a.v[i] = {re[i], im[i]};
        return a;
    }
};

} // namespace gfmud
