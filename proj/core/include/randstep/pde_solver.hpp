// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "randstep/fem1d.hpp"
#include "randstep/ode_solver.hpp"
#include "randstep/problems.hpp"

namespace randstep {

/// Semilinear parabolic problem u_t - u_xx + b(u) = f on (0, T) x (0, 1) with
/// homogeneous Dirichlet data.
struct PdeProblem {
    std::function<double(double, double)> forcing;       // f(t, x)
    fem::ScalarFn nonlinearity;                           // b
    fem::ScalarFn nonlinearity_prime;                     // b'
    fem::ScalarFn initial;                                // u0
    std::optional<std::function<double(double, double)>> exact;  // u(t, x)
    double final_time = 1.0;
    // Structural constants; metadata only.
    double monotonicity = 1.0;   // mu
    double lipschitz = 0.0;      // L
    double operator_bound = 0.0; // bound on ||A(t) 0||
};

/// Manufactured benchmark with oscillating amplitude w and truncated power b.
PdeProblem make_semilinear_heat(SawtoothSpec const& w_spec,
                                TruncatedPowerSpec const& b_spec);

/// Mesh and the time-independent matrices shared by all steps and replicas.
struct FemSystem {
    fem::Mesh mesh;
    fem::TriDiag mass;
    fem::TriDiag stiffness;

    explicit FemSystem(fem::Mesh m);
};

struct EnergyEntry {
    double h_norm_sq = 0.0;         // ||U^n||_H^2 = U^T M U
    double increment_norm_sq = 0.0; // ||U^n - U^{n-1}||_H^2
    double v_norm_sq = 0.0;         // |U^n|_{H1}^2 = U^T S U
};

struct PdeTrajectory {
    TimeGrid grid;
    std::vector<fem::DiscreteField> fields;  // N + 1 entries, fields[0] = P_h u0
    std::vector<double> nodes_used;
    std::vector<int> newton_iterations;
    std::vector<EnergyEntry> energy_log;     // N + 1 entries, entry 0 for U^0
};

struct PdeStepResult {
    fem::DiscreteField field;
    int iterations = 0;
    double residual = 0.0;  // final ||.||_inf of the step equation
};

/// Residual (M + kS) U + k N(U) - M U_prev - k F(xi) of the step equation.
std::vector<double> pde_step_residual(FemSystem const& sys, double k, double xi,
                                      fem::DiscreteField const& prev,
                                      fem::DiscreteField const& next,
                                      PdeProblem const& problem);

/// One step of the Galerkin backward Euler scheme evaluated at time xi,
///   (M + kS) U + k N(U) = M U_prev + k F(xi),  F_i = int f(xi, x) psi_i dx,
/// solved by damped Newton with tridiagonal Jacobian M + kS + k N'(U).
PdeStepResult pde_step(FemSystem const& sys, double k, double xi,
                       fem::DiscreteField const& prev, PdeProblem const& problem,
                       NewtonConfig const& cfg = {});

/// Full trajectory; the explicit scheme is rejected with IndexError.
PdeTrajectory pde_solve(PdeProblem const& problem, FemSystem const& sys,
                        TimeGrid const& grid, StepScheme scheme, NodeStream& stream,
                        NewtonConfig const& cfg = {});

struct EnergyReport {
    double max_h_norm_sq = 0.0;
    double sum_increment_sq = 0.0;
    double dissipation = 0.0;         // k mu sum ||U^j||_V^2
    double initial_h_norm_sq = 0.0;   // ||U^0||_H^2
    double forcing_norm_sq = 0.0;     // ||f||^2_{L2(0,T;H)}
    bool unstable = false;

    double lhs() const { return max_h_norm_sq + sum_increment_sq + dissipation; }
    double rhs_data(double final_time) const
    {
        return final_time + initial_h_norm_sq + forcing_norm_sq;
    }
};

/// Energy accumulators of the a priori bound, flagged unstable when they are
/// not finite or exceed 1e6 times T + ||U^0||^2 + ||f||^2.
EnergyReport energy_bound_check(PdeTrajectory const& trajectory,
                                PdeProblem const& problem);

}  // namespace randstep
