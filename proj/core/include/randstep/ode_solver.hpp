// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "randstep/rand_nodes.hpp"

namespace randstep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Initial value problem u' = f(t, u), u(0) = u0 on [0, T].
struct OdeProblem {
    using Rhs = std::function<Vector(double, Vector const&)>;
    using Jacobian = std::function<Matrix(double, Vector const&)>;

    Rhs rhs;
    std::optional<Jacobian> jacobian;  // df/dx; finite differences if absent
    Vector initial_value;
    double final_time = 1.0;
    // One-sided Lipschitz constant: (f(t,x) - f(t,y), x - y) <= nu |x - y|^2.
    double one_sided_constant = 0.0;

    int dimension() const { return static_cast<int>(initial_value.size()); }
};

enum class StepScheme {
    RandomizedBackwardEuler,
    ClassicalBackwardEuler,
    RandomizedForwardEuler,
};

inline constexpr StepScheme kAllSchemes[] = {
    StepScheme::RandomizedBackwardEuler,
    StepScheme::ClassicalBackwardEuler,
    StepScheme::RandomizedForwardEuler,
};

/// Short identifier used on the command line and in CSV files ("rbe", "be", "rfe").
std::string_view scheme_id(StepScheme scheme);
/// Inverse of scheme_id; throws IndexError for unknown identifiers.
StepScheme parse_scheme(std::string_view id);

bool is_randomized(StepScheme scheme);
bool is_implicit(StepScheme scheme);

struct NewtonConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iterations = 50;
    // Forward-difference step is fd_scale * (1 + |x_i|).
    double fd_scale = 1.4901161193847656e-08;  // sqrt(machine epsilon)
    int max_halvings = 30;

    /// Throws IndexError on non-positive tolerances or iteration limits.
    void validate() const;
};

enum class StepRestriction { Ok, StabilityWarning, Violated };

/// Classifies k * nu: >= 1 violates solvability, >= 1/4 leaves the regime of
/// the stability estimate. nu <= 0 never restricts.
StepRestriction check_step_restriction(double k, double nu);

struct StepResult {
    Vector state;
    int iterations = 0;
};

/// Solves x = u_prev + k f(t_eval, x) by damped Newton starting at u_prev.
StepResult implicit_step(OdeProblem const& problem, double t_eval,
                         Vector const& u_prev, double k,
                         NewtonConfig const& cfg = {});

/// u_prev + k f(t_eval, u_prev).
Vector explicit_step(OdeProblem const& problem, double t_eval,
                     Vector const& u_prev, double k);

struct Trajectory {
    TimeGrid grid;
    std::vector<Vector> states;        // N + 1 entries, states[0] = u0
    std::vector<double> nodes_used;    // N entries, empty for the classical scheme
    std::vector<int> newton_iterations;  // N entries
    bool stability_warning = false;      // k * nu >= 1/4
};

/// Integrates `problem` over `grid`. Randomized schemes consume exactly one
/// draw of `stream` per step, in step order.
///
/// Step failures are rethrown with the failing step index in the message.
Trajectory solve(OdeProblem const& problem, TimeGrid const& grid,
                 StepScheme scheme, NodeStream& stream,
                 NewtonConfig const& cfg = {});

/// Local residual k f(xi_n, V^n) - V^n + V^{n-1} of a grid function V.
Vector local_residual(OdeProblem const& problem,
                      std::vector<Vector> const& grid_values, int n,
                      double xi_n, double k);

/// Mean of the local residual of the exact solution over xi_n ~ U[t_{n-1}, t_n),
///   int_{t_{n-1}}^{t_n} f(s, u(t_n)) - f(s, u(s)) ds,
/// by composite Gauss quadrature with `quad_points` nodes on each of `panels`
/// equal subintervals of the step.
Vector conditional_mean_residual(OdeProblem const& problem,
                                 std::function<Vector(double)> const& exact,
                                 int n, TimeGrid const& grid, int quad_points,
                                 int panels = 1);

}  // namespace randstep
