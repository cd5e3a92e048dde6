// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

// Scalar reference kernels. Plain loops, no intrinsics; these define the
// semantics the vector variants are tested against.

#include <algorithm>
#include <cstddef>

#include "gfmud/kernels.hpp"

namespace gfmud::kernels {
namespace {

void s_rgemm(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        if (!acc) std::fill(crow, crow + n, 0.0);
        for (std::size_t l = 0; l < k; ++l) {
            const double av = a[i * k + l];
            const double* brow = b + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void s_rgemm_at(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                std::size_t n, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        if (!acc) std::fill(crow, crow + n, 0.0);
        for (std::size_t l = 0; l < k; ++l) {
            const double av = a[l * m + i];
            const double* brow = b + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void s_rgemm_bt(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                std::size_t n, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc0 = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc0 += arow[l] * brow[l];
            if (acc)
                c[i * n + j] += acc0;
            else
                c[i * n + j] = acc0;
        }
    }
}

void s_cgemm(double* cre, double* cim, const double* are, const double* aim, const double* bre,
             const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crr = cre + i * n;
        double* cri = cim + i * n;
        std::fill(crr, crr + n, 0.0);
        std::fill(cri, cri + n, 0.0);
        for (std::size_t l = 0; l < k; ++l) {
            const double ar = are[i * k + l];
            const double ai = aim[i * k + l];
            const double* brr = bre + l * n;
            const double* bri = bim + l * n;
            for (std::size_t j = 0; j < n; ++j) {
                crr[j] += ar * brr[j] - ai * bri[j];
                cri[j] += ar * bri[j] + ai * brr[j];
            }
        }
    }
}

void s_cgemm_ah(double* cre, double* cim, const double* are, const double* aim, const double* bre,
                const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crr = cre + i * n;
        double* cri = cim + i * n;
        std::fill(crr, crr + n, 0.0);
        std::fill(cri, cri + n, 0.0);
        for (std::size_t l = 0; l < k; ++l) {
            const double ar = are[l * m + i];
            const double ai = -aim[l * m + i];
            const double* brr = bre + l * n;
            const double* bri = bim + l * n;
            for (std::size_t j = 0; j < n; ++j) {
                crr[j] += ar * brr[j] - ai * bri[j];
                cri[j] += ar * bri[j] + ai * brr[j];
            }
        }
    }
}

void s_cgemm_bh(double* cre, double* cim, const double* are, const double* aim, const double* bre,
                const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arr = are + i * k;
        const double* ari = aim + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brr = bre + j * k;
            const double* bri = bim + j * k;
            double sr = 0.0, si = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                sr += arr[l] * brr[l] + ari[l] * bri[l];
                si += ari[l] * brr[l] - arr[l] * bri[l];
            }
            cre[i * n + j] = sr;
            cim[i * n + j] = si;
        }
    }
}

void s_abs2(double* out, const double* re, const double* im, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

void s_blend(double* out, double beta, const double* xnew, const double* xold, std::size_t n) {
    const double omb = 1.0 - beta;
    for (std::size_t i = 0; i < n; ++i) out[i] = beta * xnew[i] + omb * xold[i];
}

void s_onsager(double* pre, double* pim, const double* pbre, const double* pbim, const double* sre,
               const double* sim, const double* nu, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        pre[i] = pbre[i] - sre[i] * nu[i];
        pim[i] = pbim[i] - sim[i] * nu[i];
    }
}

void s_awgn_output(double* sre, double* sim, double* nus, const double* yre, const double* yim,
                   const double* pre, const double* pim, const double* nup, double sigma2,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double inv = 1.0 / (nup[i] + sigma2);
        sre[i] = (yre[i] - pre[i]) * inv;
        sim[i] = (yim[i] - pim[i]) * inv;
        nus[i] = inv;
    }
}

void s_amp_pseudo(double* outre, double* outim, const double* barre, const double* barim,
                  const double* nu, const double* g, const double* accre, const double* accim,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 - nu[i] * g[i];
        outre[i] = barre[i] * w + nu[i] * accre[i];
        outim[i] = barim[i] * w + nu[i] * accim[i];
    }
}

void s_invert_floor(double* out, const double* x, double floor, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (x[i] > floor ? x[i] : floor);
}

void s_clamp_min(double* x, double floor, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] < floor) x[i] = floor;
}

double s_sum_sq_diff(const double* are, const double* aim, const double* bre, const double* bim,
                     std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = are[i] - bre[i];
        const double di = aim[i] - bim[i];
        s += dr * dr + di * di;
    }
    return s;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops t = {s_rgemm,       s_rgemm_at,   s_rgemm_bt, s_cgemm,
                          s_cgemm_ah,    s_cgemm_bh,   s_abs2,     s_blend,
                          s_onsager,     s_awgn_output, s_amp_pseudo,
                          s_invert_floor, s_clamp_min,  s_sum_sq_diff};
    return t;
}

} // namespace gfmud::kernels
