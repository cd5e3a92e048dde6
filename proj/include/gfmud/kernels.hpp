// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstddef>
#include <string>

namespace gfmud::kernels {

// Compute kernels behind the AMP inner loops. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant. The active
// variant is chosen at runtime: best available by default, overridable via
// set_backend() or the GFMUD_KERNELS environment variable ("scalar"/"avx2").
// Scalar and vector variants are equivalence-tested against each other.
//
// Complex matrices are passed as split re/im planes, row-major.

enum class Backend { scalar, avx2 };

// Highest-performance backend supported by this CPU.
Backend best_backend();
bool backend_available(Backend b);

// Select the active backend; returns false (and leaves the selection
// unchanged) if the requested backend is unavailable on this machine.
bool set_backend(Backend b);
Backend active_backend();
std::string backend_name(Backend b);

struct Ops {
    // C[m x n] = A[m x k] * B[k x n]; accumulates into C when acc is true.
    void (*rgemm)(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                  std::size_t n, bool acc);
    // C[m x n] = A^T * B with A stored [k x m], B [k x n].
    void (*rgemm_at)(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                     std::size_t n, bool acc);
    // C[m x n] = A * B^T with A stored [m x k], B [n x k].
    void (*rgemm_bt)(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
                     std::size_t n, bool acc);

    // Complex C[m x n] = A[m x k] * B[k x n].
    void (*cgemm)(double* cre, double* cim, const double* are, const double* aim,
                  const double* bre, const double* bim, std::size_t m, std::size_t k,
                  std::size_t n);
    // Complex C[m x n] = A^H * B with A stored [k x m], B [k x n].
    void (*cgemm_ah)(double* cre, double* cim, const double* are, const double* aim,
                     const double* bre, const double* bim, std::size_t m, std::size_t k,
                     std::size_t n);
    // Complex C[m x n] = A * B^H with A stored [m x k], B [n x k].
    void (*cgemm_bh)(double* cre, double* cim, const double* are, const double* aim,
                     const double* bre, const double* bim, std::size_t m, std::size_t k,
                     std::size_t n);

    // out[i] = re[i]^2 + im[i]^2
    void (*abs2)(double* out, const double* re, const double* im, std::size_t n);
    // out[i] = beta*xnew[i] + (1-beta)*xold[i]
    void (*blend)(double* out, double beta, const double* xnew, const double* xold,
                  std::size_t n);
    // Onsager-corrected mean: p[i] = pbar[i] - s[i]*nu[i] (complex p, s; real nu).
    void (*onsager)(double* pre, double* pim, const double* pbre, const double* pbim,
                    const double* sre, const double* sim, const double* nu, std::size_t n);
    // AWGN output stage: s = (y - p) / (nup + sigma2), nus = 1 / (nup + sigma2).
    void (*awgn_output)(double* sre, double* sim, double* nus, const double* yre,
                        const double* yim, const double* pre, const double* pim,
                        const double* nup, double sigma2, std::size_t n);
    // Pseudo-observation assembly: out = bar*(1 - nu.*g) + nu.*acc (complex bar/acc, real nu/g).
    void (*amp_pseudo)(double* outre, double* outim, const double* barre, const double* barim,
                       const double* nu, const double* g, const double* accre,
                       const double* accim, std::size_t n);
    // out[i] = 1 / max(x[i], floor)
    void (*invert_floor)(double* out, const double* x, double floor, std::size_t n);
    // x[i] = max(x[i], floor)
    void (*clamp_min)(double* x, double floor, std::size_t n);
    // sum_i |a[i] - b[i]|^2 over split-complex arrays
    double (*sum_sq_diff)(const double* are, const double* aim, const double* bre,
                          const double* bim, std::size_t n);
};

// Active operation table (runtime-dispatched).
const Ops& ops();
// Fixed tables, used by the equivalence tests.
const Ops& scalar_ops();
const Ops* avx2_ops(); // nullptr when not compiled in / unsupported

} // namespace gfmud::kernels
