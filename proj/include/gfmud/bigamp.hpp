// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "gfmud/constellation.hpp"
#include "gfmud/mat.hpp"

namespace gfmud {

// Prior for one signal entry: point mass at zero plus weighted constellation
// atoms. zero_mass + sum(masses) must be 1.
struct EntryPriorX {
    double zero_mass = 0.0;
    std::vector<cplx> points;
    std::vector<double> masses;

    static EntryPriorX sparse_uniform(double gamma, const Constellation& cst);
    void validate() const; // throws std::invalid_argument
};

// Zero-mean complex Gaussian channel prior, variance per entry.
struct EntryPriorH {
    double variance = 1.0;
};

// Discrete posterior of one signal entry.
struct MarginalPosterior {
    double zero_mass = 0.0;
    std::vector<double> point_masses;
    cplx mean;
    double var = 0.0;
};

// Posterior merge of a pseudo-observation r ~ CN(x, nu_r) with the sparse
// discrete prior; computed in the log domain.
MarginalPosterior merge_x(cplx r_hat, double nu_r, const EntryPriorX& prior);

// Conjugate Gaussian merge for a channel entry: returns (mean, variance).
std::pair<cplx, double> merge_h(cplx q_hat, double nu_q, const EntryPriorH& prior);

// Per-entry signal priors on an N x T grid. Atoms are shared; empty
// atom_mass means uniform (1 - zero_mass)/K per atom in every entry.
struct PriorXGrid {
    std::vector<cplx> points;
    RMat zero_mass;              // N x T
    std::vector<RMat> atom_mass; // K grids of N x T, or empty for uniform

    static PriorXGrid uniform(const EntryPriorX& p, std::size_t n, std::size_t t);
    EntryPriorX at(std::size_t n, std::size_t t) const;
};

struct BigAmpOptions {
    std::uint32_t max_iters = 100;           // inner iteration cap
    std::uint32_t max_restart_attempts = 10; // damping-schedule restarts allowed
    double tol = 1e-4;                       // relative change threshold on x
    double step_init = 1.0;
    double step_min = 0.05;
    double step_max = 1.0; // growth ceiling
    double step_shrink = 0.5;
    double step_grow = 1.1;
    std::uint32_t trials = 1; // independently initialized runs
    std::uint64_t seed = 0;
    double divergence_bound = 1e12; // on the squared residual
    double var_floor = 1e-12;
    bool validate_numerics = false; // track normalization error / finiteness
    bool collect_trace = false;
};

struct TracePoint {
    std::uint32_t iter = 0;
    double residual = 0.0;
    double step = 0.0;
};

struct BigAmpResult {
    SplitMat x_mean; // N x T
    RMat x_var;
    RMat x_zero; // posterior mass of the zero atom per entry
    SplitMat h_mean; // M x N
    RMat h_var;
    double residual = std::numeric_limits<double>::infinity(); // ||Y - H X||_F
    std::uint32_t iterations = 0;
    bool converged = false;
    bool diverged = false;
    std::uint32_t restart_attempts = 0;
    double max_norm_dev = 0.0; // filled when validate_numerics is on
    bool finite_ok = true;
    std::uint32_t trial = 0;
    std::vector<TracePoint> trace;
};

// Bilinear AMP engine with adaptive damping. Estimates H (M x N) and X
// (N x T) from Y = H X + W given element-wise priors. The damping step
// starts at step_init; a candidate iteration is accepted when its residual
// cost does not exceed the worst of the last few accepted costs, otherwise
// the step shrinks and the candidate is recomputed. A rejection already at
// step_min is force-accepted; the schedule restarts from the initial step
// for the first max_restart_attempts such events and stays at the minimum
// step afterwards. A cost beyond divergence_bound that can no longer shrink
// stops the run flagged diverged. The returned estimate is always the
// lowest-cost accepted state.
//
// The engine keeps its message state across set_prior_x/run calls, which is
// what the turbo detector's outer loop relies on.
class BigAmpEngine {
  public:
    enum class Stop { converged, iter_budget, diverged };

    // Blind mode: H unknown, random initialization from `seed`.
    BigAmpEngine(const CMat& y, PriorXGrid prior_x, EntryPriorH prior_h, double sigma2,
                 const BigAmpOptions& opts, std::uint64_t seed);
    // Known-channel mode: H clamped, deterministic zero-mean initialization.
    // The schedule then reduces to GAMP on X alone.
    BigAmpEngine(const CMat& y, const CMat& h_known, PriorXGrid prior_x, double sigma2,
                 const BigAmpOptions& opts);
    ~BigAmpEngine();
    BigAmpEngine(BigAmpEngine&&) noexcept;
    BigAmpEngine& operator=(BigAmpEngine&&) noexcept;

    // Replaces the signal prior, keeping message state; resets the damping
    // schedule and the accept/reject reference cost.
    void set_prior_x(PriorXGrid prior);
    // Test hook: overwrite the initial means/variances before the first run.
    void seed_state(const CMat& x0, const RMat& nux0, const CMat& h0, const RMat& nuh0);

    // Runs up to `iters` additional accepted iterations.
    Stop run(std::uint32_t iters);

    BigAmpResult result() const; // lowest-cost state seen so far
    const RMat& cur_x_zero() const;
    const SplitMat& cur_x_mean() const;
    double cur_residual() const;
    std::uint32_t restart_attempts() const;

  private:
    struct Impl;
    Impl* impl_;
};

// R = opts.trials independently initialized runs; one result per trial, in
// trial order. Trial seeds derive from opts.seed.
std::vector<BigAmpResult> run_bigamp(const CMat& y, std::size_t n, const EntryPriorX& prior_x,
                                     EntryPriorH prior_h, double sigma2,
                                     const BigAmpOptions& opts);

// Known-channel GAMP: single deterministic run.
BigAmpResult run_csi_gamp(const CMat& y, const CMat& h_known, const EntryPriorX& prior_x,
                          double sigma2, const BigAmpOptions& opts);

// Lowest residual; ties resolve to the lowest trial index.
const BigAmpResult& select_best(const std::vector<BigAmpResult>& results);

} // namespace gfmud
