// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/ode_solver.hpp"

#include <cmath>
#include <string>

#include "randstep/error.hpp"
#include "randstep/quadrature.hpp"

namespace randstep {

std::string_view scheme_id(StepScheme scheme)
{
    switch (scheme) {
        case StepScheme::RandomizedBackwardEuler: return "rbe";
        case StepScheme::ClassicalBackwardEuler: return "be";
        case StepScheme::RandomizedForwardEuler: return "rfe";
    }
    return "?";
}

StepScheme parse_scheme(std::string_view id)
{
    for (StepScheme s : kAllSchemes) {
        if (scheme_id(s) == id) return s;
    }
    throw IndexError("unknown scheme '" + std::string(id) +
                     "' (expected rbe, be or rfe)");
}

bool is_randomized(StepScheme scheme)
{
    return scheme != StepScheme::ClassicalBackwardEuler;
}

bool is_implicit(StepScheme scheme)
{
    return scheme != StepScheme::RandomizedForwardEuler;
}

void NewtonConfig::validate() const
{
    if (!(abs_tol > 0) || !(rel_tol > 0)) {
        throw IndexError("NewtonConfig: tolerances must be positive");
    }
    if (max_iterations < 1) {
        throw IndexError("NewtonConfig: max_iterations must be at least 1");
    }
    if (!(fd_scale > 0) || max_halvings < 0) {
        throw IndexError("NewtonConfig: invalid finite-difference or damping settings");
    }
}

StepRestriction check_step_restriction(double k, double nu)
{
    if (nu <= 0) return StepRestriction::Ok;
    double const knu = k * nu;
    if (knu >= 1.0) return StepRestriction::Violated;
    if (knu >= 0.25) return StepRestriction::StabilityWarning;
    return StepRestriction::Ok;
}

namespace {

Matrix jacobian_at(OdeProblem const& problem, double t, Vector const& x,
                   Vector const& fx, NewtonConfig const& cfg)
{
    if (problem.jacobian) return (*problem.jacobian)(t, x);
    int const d = static_cast<int>(x.size());
    Matrix jac(d, d);
    Vector probe = x;
    for (int j = 0; j < d; ++j) {
        double const h = cfg.fd_scale * (1.0 + std::abs(x[j]));
        probe[j] = x[j] + h;
        jac.col(j) = (problem.rhs(t, probe) - fx) / h;
        probe[j] = x[j];
    }
    return jac;
}

std::string at_step(std::string const& what, int n)
{
    return "step " + std::to_string(n) + ": " + what;
}

}  // namespace

StepResult implicit_step(OdeProblem const& problem, double t_eval,
                         Vector const& u_prev, double k,
                         NewtonConfig const& cfg)
{
    cfg.validate();
    if (!(k > 0)) throw IndexError("implicit_step: step size must be positive");
    if (check_step_restriction(k, problem.one_sided_constant) ==
        StepRestriction::Violated) {
        throw StepRestrictionViolated(
            "implicit_step: k*nu = " + std::to_string(k * problem.one_sided_constant) +
            " >= 1");
    }

    int const d = static_cast<int>(u_prev.size());
    Vector x = u_prev;
    Vector fx = problem.rhs(t_eval, x);
    Vector r = x - u_prev - k * fx;
    double rnorm = r.norm();

    StepResult out;
    while (!(rnorm <= cfg.abs_tol + cfg.rel_tol * x.norm())) {
        if (out.iterations == cfg.max_iterations || !std::isfinite(rnorm)) {
            throw NonConvergence("implicit_step: residual " + std::to_string(rnorm) +
                                 " after " + std::to_string(out.iterations) +
                                 " Newton iterations at t = " + std::to_string(t_eval));
        }
        Matrix jac = Matrix::Identity(d, d) - k * jacobian_at(problem, t_eval, x, fx, cfg);
        Eigen::PartialPivLU<Matrix> lu(jac);
        Vector const delta = lu.solve(r);
        if (!delta.allFinite()) {
            throw SingularMatrix("implicit_step: singular Newton matrix at t = " +
                                 std::to_string(t_eval));
        }

        // Armijo-style fallback: halve the update until the residual drops.
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
            Vector trial = x - alpha * delta;
            Vector ftrial = problem.rhs(t_eval, trial);
            Vector rtrial = trial - u_prev - k * ftrial;
            double const tnorm = rtrial.norm();
            if (tnorm < rnorm) {
                x = std::move(trial);
                fx = std::move(ftrial);
                r = std::move(rtrial);
                rnorm = tnorm;
                accepted = true;
                break;
            }
        }
        ++out.iterations;
        if (!accepted) {
            throw NonConvergence("implicit_step: damped Newton update failed to reduce residual " +
                                 std::to_string(rnorm) + " at t = " + std::to_string(t_eval));
        }
    }
    out.state = std::move(x);
    return out;
}

Vector explicit_step(OdeProblem const& problem, double t_eval,
                     Vector const& u_prev, double k)
{
    if (!(k > 0)) throw IndexError("explicit_step: step size must be positive");
    return u_prev + k * problem.rhs(t_eval, u_prev);
}

Trajectory solve(OdeProblem const& problem, TimeGrid const& grid,
                 StepScheme scheme, NodeStream& stream, NewtonConfig const& cfg)
{
    if (std::abs(grid.final_time() - problem.final_time) >
        1e-14 * std::abs(problem.final_time)) {
        throw IndexError("solve: grid final time does not match the problem");
    }
    double const k = grid.step_size();
    int const steps = grid.steps();

    Trajectory traj{grid, {}, {}, {}, false};
    if (is_implicit(scheme)) {
        switch (check_step_restriction(k, problem.one_sided_constant)) {
            case StepRestriction::Violated:
                throw StepRestrictionViolated(
                    "solve: k*nu = " + std::to_string(k * problem.one_sided_constant) +
                    " >= 1 for " + std::string(scheme_id(scheme)));
            case StepRestriction::StabilityWarning:
                traj.stability_warning = true;
                break;
            case StepRestriction::Ok:
                break;
        }
    }

    traj.states.reserve(steps + 1);
    traj.states.push_back(problem.initial_value);
    traj.newton_iterations.reserve(steps);
    if (is_randomized(scheme)) traj.nodes_used.reserve(steps);

    for (int n = 1; n <= steps; ++n) {
        double t_eval = grid.node(n);
        if (is_randomized(scheme)) {
            t_eval = node(grid, n, stream.next_tau());
            traj.nodes_used.push_back(t_eval);
        }
        Vector const& prev = traj.states.back();
        try {
            if (is_implicit(scheme)) {
                StepResult step = implicit_step(problem, t_eval, prev, k, cfg);
                traj.newton_iterations.push_back(step.iterations);
                traj.states.push_back(std::move(step.state));
            } else {
                traj.newton_iterations.push_back(0);
                traj.states.push_back(explicit_step(problem, t_eval, prev, k));
            }
        } catch (NonConvergence const& e) {
            throw NonConvergence(at_step(e.what(), n));
        } catch (SingularMatrix const& e) {
            throw SingularMatrix(at_step(e.what(), n));
        } catch (StepRestrictionViolated const& e) {
            throw StepRestrictionViolated(at_step(e.what(), n));
        }
    }
    return traj;
}

Vector local_residual(OdeProblem const& problem,
                      std::vector<Vector> const& grid_values, int n,
                      double xi_n, double k)
{
    int const steps = static_cast<int>(grid_values.size()) - 1;
    if (n < 1 || n > steps) {
        throw IndexError("local_residual: step index " + std::to_string(n) +
                         " outside [1, " + std::to_string(steps) + "]");
    }
    return k * problem.rhs(xi_n, grid_values[n]) - grid_values[n] + grid_values[n - 1];
}

Vector conditional_mean_residual(OdeProblem const& problem,
                                 std::function<Vector(double)> const& exact,
                                 int n, TimeGrid const& grid, int quad_points,
                                 int panels)
{
    if (n < 1 || n > grid.steps()) {
        throw IndexError("conditional_mean_residual: step index out of range");
    }
    if (quad_points < 2 || panels < 1) {
        throw IndexError("conditional_mean_residual: need quad_points >= 2, panels >= 1");
    }
    GaussRule const rule = gauss_legendre(quad_points);
    double const a = grid.node(n - 1);
    double const b = grid.node(n);
    double const width = (b - a) / panels;
    Vector const u_end = exact(b);

    Vector total = Vector::Zero(u_end.size());
    for (int p = 0; p < panels; ++p) {
        double const mid = a + (p + 0.5) * width;
        for (int q = 0; q < rule.size(); ++q) {
            double const s = mid + 0.5 * width * rule.points[q];
            total += (0.5 * width * rule.weights[q]) *
                     (problem.rhs(s, u_end) - problem.rhs(s, exact(s)));
        }
    }
    return total;
}

}  // namespace randstep
