// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "randstep/ode_solver.hpp"
#include "randstep/pde_solver.hpp"
#include "randstep/problems.hpp"

namespace randstep {

enum class ErrorMode { FinalTime, MaxOverGrid };

/// ODE benchmark with known exact solution.
struct OdeBenchmark {
    OdeProblem problem;
    std::function<Vector(double)> exact;
};

/// PDE benchmark; errors are L2(0,1) distances to problem.exact.
struct PdeBenchmark {
    PdeProblem problem;
    int mesh_dof = 127;
};

struct ExperimentSpec {
    std::variant<OdeBenchmark, PdeBenchmark> benchmark;
    std::vector<StepScheme> schemes;
    std::vector<int> step_exponents;  // k = 2^-n, strictly increasing
    int mc_replicas = 1;
    std::uint64_t master_seed = kDefaultMasterSeed;
    int workers = 1;
    NewtonConfig newton;

    /// Throws IndexError on an inconsistent experiment setup.
    void validate() const;
};

struct ErrorRow {
    StepScheme scheme;
    int steps = 0;             // N
    double step_size = 0.0;    // k
    int replicas = 0;
    double rms_error_final = 0.0;
    double rms_error_max = 0.0;
    double mc_stderr_final = 0.0;
    double mean_newton_iters = 0.0;

    int exponent() const;  // n with k = 2^-n
};

struct ErrorTable {
    std::vector<ErrorRow> rows;

    std::vector<ErrorRow> rows_for(StepScheme scheme) const;
};

struct RateWindow {
    int lo = 0;  // inclusive step exponents
    int hi = 0;
};

struct RateFit {
    StepScheme scheme;
    RateWindow window;
    double slope = 0.0;      // of log2(error) against log2(k)
    double intercept = 0.0;
    double residual = 0.0;   // RMS of the log2 fit residuals
};

/// Root-mean-square errors over replicas for every (scheme, k).
///
/// Replica r of every randomized scheme draws from substream (master_seed, r).
/// Replicas run on `workers` threads; results are combined in ascending
/// replica order, so the table does not depend on the worker count.
/// Deterministic schemes ignore the node stream and are integrated once.
ErrorTable run_mc(ExperimentSpec const& spec);

/// Least-squares slope of log2(rms) against log2(k) over exponents in `window`.
/// Non-positive errors raise FitError unless `clamp_nonpositive` is set, in
/// which case they are replaced by 1e-30.
RateFit fit_rate(ErrorTable const& table, StepScheme scheme, RateWindow window,
                 ErrorMode mode = ErrorMode::FinalTime, bool clamp_nonpositive = false);

/// Same fit for raw (k, value) pairs.
RateFit fit_loglog(std::vector<double> const& step_sizes,
                   std::vector<double> const& values);

// CSV I/O. Reals are written in scientific notation with 17 significant digits.
void write_error_table(std::ostream& out, ErrorTable const& table);
ErrorTable read_error_table(std::istream& in);
void write_rate_fits(std::ostream& out, std::vector<RateFit> const& fits);

enum class Scale { Desk, Paper };

struct FigureResult {
    ExperimentSpec spec;
    ErrorTable table;
    RateWindow pre_window;
    RateWindow post_window;
    std::vector<RateFit> fits;  // pre then post for each fitted scheme
    int sawtooth_exponent = 0;  // K
};

struct FigureOptions {
    Scale scale = Scale::Desk;
    std::uint64_t master_seed = kDefaultMasterSeed;
    int workers = 1;
};

/// Prothero-Robinson, lambda = 2: randomized vs classical backward Euler.
FigureResult reproduce_fig1_left(FigureOptions const& options = {});
/// Prothero-Robinson, lambda = -1000: randomized backward vs forward Euler.
FigureResult reproduce_fig1_right(FigureOptions const& options = {});
/// Semilinear heat benchmark: randomized vs classical backward Euler.
FigureResult reproduce_fig2(FigureOptions const& options = {});

struct ResidualRow {
    int exponent = 0;
    double step_size = 0.0;
    double rms_residual = 0.0;   // (sum_n E|rho_n|^2)^(1/2), Monte Carlo
    double mean_residual = 0.0;  // max_n |E rho_n|, quadrature
};

/// Local residuals of the exact solution for k = 2^-n, n in [lo, hi].
/// Quadrature for the mean uses 2-point Gauss on max(1, k * panels_per_unit)
/// panels per step.
std::vector<ResidualRow> residual_study(OdeBenchmark const& benchmark, RateWindow exponents,
                                        int replicas, std::uint64_t master_seed,
                                        int panels_per_unit);

}  // namespace randstep
