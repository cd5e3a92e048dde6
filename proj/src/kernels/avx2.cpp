// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; dispatch.cpp installs these pointers after a runtime
// CPU feature check.

#include <cstddef>

#include "gfmud/kernels.hpp"

#if defined(GFMUD_HAVE_AVX2)

#include <immintrin.h>

namespace gfmud::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d h = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, h));
}

void v_rgemm_core(double* c, const double* a, std::size_t a_rstride, std::size_t a_cstride,
                  const double* b, std::size_t m, std::size_t k, std::size_t n, bool acc) {
    const std::size_t n16 = n & ~std::size_t{15};
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        const double* acol = a + i * a_rstride;
        std::size_t j = 0;
        for (; j < n16; j += 16) {
            __m256d c0, c1, c2, c3;
            if (acc) {
                c0 = _mm256_loadu_pd(crow + j);
                c1 = _mm256_loadu_pd(crow + j + 4);
                c2 = _mm256_loadu_pd(crow + j + 8);
                c3 = _mm256_loadu_pd(crow + j + 12);
            } else {
                c0 = c1 = c2 = c3 = _mm256_setzero_pd();
            }
            for (std::size_t l = 0; l < k; ++l) {
                const __m256d av = _mm256_set1_pd(acol[l * a_cstride]);
                const double* bp = b + l * n + j;
                c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(bp), c0);
                c1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + 4), c1);
                c2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + 8), c2);
                c3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + 12), c3);
            }
            _mm256_storeu_pd(crow + j, c0);
            _mm256_storeu_pd(crow + j + 4, c1);
            _mm256_storeu_pd(crow + j + 8, c2);
            _mm256_storeu_pd(crow + j + 12, c3);
        }
        for (; j < n4; j += 4) {
            __m256d c0 = acc ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
            for (std::size_t l = 0; l < k; ++l) {
                const __m256d av = _mm256_set1_pd(acol[l * a_cstride]);
                c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + l * n + j), c0);
            }
            _mm256_storeu_pd(crow + j, c0);
        }
        for (; j < n; ++j) {
            double s = acc ? crow[j] : 0.0;
            for (std::size_t l = 0; l < k; ++l) s += acol[l * a_cstride] * b[l * n + j];
            crow[j] = s;
        }
    }
}

void v_rgemm(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n, bool acc) {
    v_rgemm_core(c, a, k, 1, b, m, k, n, acc);
}

void v_rgemm_at(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                std::size_t n, bool acc) {
    v_rgemm_core(c, a, 1, m, b, m, k, n, acc);
}

void v_rgemm_bt(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                std::size_t n, bool acc) {
    const std::size_t k8 = k & ~std::size_t{7};
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            __m256d s0 = _mm256_setzero_pd();
            __m256d s1 = _mm256_setzero_pd();
            std::size_t l = 0;
            for (; l < k8; l += 8) {
                s0 = _mm256_fmadd_pd(_mm256_loadu_pd(arow + l), _mm256_loadu_pd(brow + l), s0);
                s1 = _mm256_fmadd_pd(_mm256_loadu_pd(arow + l + 4), _mm256_loadu_pd(brow + l + 4),
                                     s1);
            }
            double s = hsum(_mm256_add_pd(s0, s1));
            for (; l < k; ++l) s += arow[l] * brow[l];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
}

void v_cgemm_core(double* cre, double* cim, const double* are, const double* aim,
                  std::size_t a_rstride, std::size_t a_cstride, bool conj_a, const double* bre,
                  const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    const std::size_t n8 = n & ~std::size_t{7};
    const double asign = conj_a ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double* crr = cre + i * n;
        double* cri = cim + i * n;
        const double* arr = are + i * a_rstride;
        const double* ari = aim + i * a_rstride;
        std::size_t j = 0;
        for (; j < n8; j += 8) {
            __m256d r0 = _mm256_setzero_pd(), r1 = _mm256_setzero_pd();
            __m256d i0 = _mm256_setzero_pd(), i1 = _mm256_setzero_pd();
            for (std::size_t l = 0; l < k; ++l) {
                const __m256d ar = _mm256_set1_pd(arr[l * a_cstride]);
                const __m256d ai = _mm256_set1_pd(asign * ari[l * a_cstride]);
                const double* brp = bre + l * n + j;
                const double* bip = bim + l * n + j;
                const __m256d br0 = _mm256_loadu_pd(brp);
                const __m256d br1 = _mm256_loadu_pd(brp + 4);
                const __m256d bi0 = _mm256_loadu_pd(bip);
                const __m256d bi1 = _mm256_loadu_pd(bip + 4);
                r0 = _mm256_fmadd_pd(ar, br0, r0);
                r0 = _mm256_fnmadd_pd(ai, bi0, r0);
                r1 = _mm256_fmadd_pd(ar, br1, r1);
                r1 = _mm256_fnmadd_pd(ai, bi1, r1);
                i0 = _mm256_fmadd_pd(ar, bi0, i0);
                i0 = _mm256_fmadd_pd(ai, br0, i0);
                i1 = _mm256_fmadd_pd(ar, bi1, i1);
                i1 = _mm256_fmadd_pd(ai, br1, i1);
            }
            _mm256_storeu_pd(crr + j, r0);
            _mm256_storeu_pd(crr + j + 4, r1);
            _mm256_storeu_pd(cri + j, i0);
            _mm256_storeu_pd(cri + j + 4, i1);
        }
        for (; j < n; ++j) {
            double sr = 0.0, si = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                const double ar = arr[l * a_cstride];
                const double ai = asign * ari[l * a_cstride];
                const double br = bre[l * n + j];
                const double bi = bim[l * n + j];
                sr += ar * br - ai * bi;
                si += ar * bi + ai * br;
            }
            crr[j] = sr;
            cri[j] = si;
        }
    }
}

void v_cgemm(double* cre, double* cim, const double* are, const double* aim, const double* bre,
             const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    v_cgemm_core(cre, cim, are, aim, k, 1, false, bre, bim, m, k, n);
}

void v_cgemm_ah(double* cre, double* cim, const double* are, const double* aim, const double* bre,
                const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    v_cgemm_core(cre, cim, are, aim, 1, m, true, bre, bim, m, k, n);
}

void v_cgemm_bh(double* cre, double* cim, const double* are, const double* aim, const double* bre,
                const double* bim, std::size_t m, std::size_t k, std::size_t n) {
    const std::size_t k4 = k & ~std::size_t{3};
    for (std::size_t i = 0; i < m; ++i) {
        const double* arr = are + i * k;
        const double* ari = aim + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brr = bre + j * k;
            const double* bri = bim + j * k;
            __m256d sr = _mm256_setzero_pd();
            __m256d si = _mm256_setzero_pd();
            std::size_t l = 0;
            for (; l < k4; l += 4) {
                const __m256d ar = _mm256_loadu_pd(arr + l);
                const __m256d ai = _mm256_loadu_pd(ari + l);
                const __m256d br = _mm256_loadu_pd(brr + l);
                const __m256d bi = _mm256_loadu_pd(bri + l);
                sr = _mm256_fmadd_pd(ar, br, sr);
                sr = _mm256_fmadd_pd(ai, bi, sr);
                si = _mm256_fmadd_pd(ai, br, si);
                si = _mm256_fnmadd_pd(ar, bi, si);
            }
            double sumr = hsum(sr), sumi = hsum(si);
            for (; l < k; ++l) {
                sumr += arr[l] * brr[l] + ari[l] * bri[l];
                sumi += ari[l] * brr[l] - arr[l] * bri[l];
            }
            cre[i * n + j] = sumr;
            cim[i * n + j] = sumi;
        }
    }
}

void v_abs2(double* out, const double* re, const double* im, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d r = _mm256_loadu_pd(re + i);
        const __m256d m = _mm256_loadu_pd(im + i);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(r, r, _mm256_mul_pd(m, m)));
    }
    for (; i < n; ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

void v_blend(double* out, double beta, const double* xnew, const double* xold, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d vb = _mm256_set1_pd(beta);
    const __m256d vo = _mm256_set1_pd(1.0 - beta);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d a = _mm256_mul_pd(vb, _mm256_loadu_pd(xnew + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vo, _mm256_loadu_pd(xold + i), a));
    }
    const double omb = 1.0 - beta;
    for (; i < n; ++i) out[i] = beta * xnew[i] + omb * xold[i];
}

void v_onsager(double* pre, double* pim, const double* pbre, const double* pbim, const double* sre,
               const double* sim, const double* nu, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d v = _mm256_loadu_pd(nu + i);
        _mm256_storeu_pd(pre + i,
                         _mm256_fnmadd_pd(_mm256_loadu_pd(sre + i), v, _mm256_loadu_pd(pbre + i)));
        _mm256_storeu_pd(pim + i,
                         _mm256_fnmadd_pd(_mm256_loadu_pd(sim + i), v, _mm256_loadu_pd(pbim + i)));
    }
    for (; i < n; ++i) {
        pre[i] = pbre[i] - sre[i] * nu[i];
        pim[i] = pbim[i] - sim[i] * nu[i];
    }
}

void v_awgn_output(double* sre, double* sim, double* nus, const double* yre, const double* yim,
                   const double* pre, const double* pim, const double* nup, double sigma2,
                   std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d vs2 = _mm256_set1_pd(sigma2);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(_mm256_loadu_pd(nup + i), vs2));
        _mm256_storeu_pd(
            sre + i,
            _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(yre + i), _mm256_loadu_pd(pre + i)), inv));
        _mm256_storeu_pd(
            sim + i,
            _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(yim + i), _mm256_loadu_pd(pim + i)), inv));
        _mm256_storeu_pd(nus + i, inv);
    }
    for (; i < n; ++i) {
        const double inv = 1.0 / (nup[i] + sigma2);
        sre[i] = (yre[i] - pre[i]) * inv;
        sim[i] = (yim[i] - pim[i]) * inv;
        nus[i] = inv;
    }
}

void v_amp_pseudo(double* outre, double* outim, const double* barre, const double* barim,
                  const double* nu, const double* g, const double* accre, const double* accim,
                  std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d vnu = _mm256_loadu_pd(nu + i);
        const __m256d w = _mm256_fnmadd_pd(vnu, _mm256_loadu_pd(g + i), one);
        _mm256_storeu_pd(outre + i,
                         _mm256_fmadd_pd(_mm256_loadu_pd(barre + i), w,
                                         _mm256_mul_pd(vnu, _mm256_loadu_pd(accre + i))));
        _mm256_storeu_pd(outim + i,
                         _mm256_fmadd_pd(_mm256_loadu_pd(barim + i), w,
                                         _mm256_mul_pd(vnu, _mm256_loadu_pd(accim + i))));
    }
    for (; i < n; ++i) {
        const double w = 1.0 - nu[i] * g[i];
        outre[i] = barre[i] * w + nu[i] * accre[i];
        outim[i] = barim[i] * w + nu[i] * accim[i];
    }
}

void v_invert_floor(double* out, const double* x, double floor, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d vf = _mm256_set1_pd(floor);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d v = _mm256_max_pd(_mm256_loadu_pd(x + i), vf);
        _mm256_storeu_pd(out + i, _mm256_div_pd(one, v));
    }
    for (; i < n; ++i) out[i] = 1.0 / (x[i] > floor ? x[i] : floor);
}

void v_clamp_min(double* x, double floor, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d vf = _mm256_set1_pd(floor);
    std::size_t i = 0;
    for (; i < n4; i += 4)
        _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), vf));
    for (; i < n; ++i)
        if (x[i] < floor) x[i] = floor;
}

double v_sum_sq_diff(const double* are, const double* aim, const double* bre, const double* bim,
                     std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(are + i), _mm256_loadu_pd(bre + i));
        const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(aim + i), _mm256_loadu_pd(bim + i));
        acc = _mm256_fmadd_pd(dr, dr, acc);
        acc = _mm256_fmadd_pd(di, di, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double dr = are[i] - bre[i];
        const double di = aim[i] - bim[i];
        s += dr * dr + di * di;
    }
    return s;
}

} // namespace

const Ops* avx2_ops_table() {
    static const Ops t = {v_rgemm,       v_rgemm_at,   v_rgemm_bt, v_cgemm,
                          v_cgemm_ah,    v_cgemm_bh,   v_abs2,     v_blend,
                          v_onsager,     v_awgn_output, v_amp_pseudo,
                          v_invert_floor, v_clamp_min,  v_sum_sq_diff};
    return &t;
}

} // namespace gfmud::kernels

#endif // GFMUD_HAVE_AVX2
