// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "randstep/error.hpp"
#include "randstep/quadrature.hpp"

namespace randstep {

namespace {

double inf_norm(std::span<double const> v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::string at_step(std::string const& what, int n)
{
    return "step " + std::to_string(n) + ": " + what;
}

}  // namespace

PdeProblem make_semilinear_heat(SawtoothSpec const& w_spec,
                                TruncatedPowerSpec const& b_spec)
{
    w_spec.validate();
    b_spec.validate();
    if (w_spec.amplitude != SawtoothAmplitude::Pde) {
        throw IndexError("make_semilinear_heat: w needs the Pde amplitude mode");
    }
    PdeProblem p;
    p.forcing = [w_spec, b_spec](double t, double x) {
        return pde_forcing(w_spec, b_spec, t, x);
    };
    p.nonlinearity = [b_spec](double x) { return b_trunc(b_spec, x); };
    p.nonlinearity_prime = [b_spec](double x) { return b_trunc_prime(b_spec, x); };
    p.initial = [](double x) { return pde_initial(x); };
    p.exact = [w_spec](double t, double x) { return pde_exact(w_spec, t, x); };
    p.final_time = 1.0;
    // -u_xx + b(u) on H^1_0 normed by |.|_{H1}: b is monotone, so mu = 1 and
    // L = 1 + (p-1) R^(p-2) / pi^2 through the Poincare constant.
    p.monotonicity = 1.0;
    p.lipschitz = 1.0 + (b_spec.power - 1.0) * std::pow(b_spec.cap, b_spec.power - 2.0) /
                            (std::numbers::pi * std::numbers::pi);
    p.operator_bound = 0.0;
    return p;
}

FemSystem::FemSystem(fem::Mesh m)
    : mesh{m}, mass{fem::assemble_mass(m)}, stiffness{fem::assemble_stiffness(m)}
{
}

namespace {

std::vector<double> step_rhs(FemSystem const& sys, double k, double xi,
                             fem::DiscreteField const& prev, PdeProblem const& problem)
{
    std::vector<double> rhs = sys.mass.apply(prev.view());
    std::vector<double> const load =
        fem::assemble_load(sys.mesh, [&](double x) { return problem.forcing(xi, x); });
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += k * load[i];
    return rhs;
}

std::vector<double> operator_residual(FemSystem const& sys, fem::TriDiag const& system,
                                      double k, fem::DiscreteField const& u,
                                      std::vector<double> const& rhs,
                                      PdeProblem const& problem)
{
    std::vector<double> r = system.apply(u.view());
    if (problem.nonlinearity) {
        std::vector<double> const nl =
            fem::assemble_nonlinearity(sys.mesh, problem.nonlinearity, u);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += k * nl[i];
    }
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
    return r;
}

}  // namespace

std::vector<double> pde_step_residual(FemSystem const& sys, double k, double xi,
                                      fem::DiscreteField const& prev,
                                      fem::DiscreteField const& next,
                                      PdeProblem const& problem)
{
    fem::TriDiag const system = fem::TriDiag::combine(1.0, sys.mass, k, sys.stiffness);
    return operator_residual(sys, system, k, next, step_rhs(sys, k, xi, prev, problem),
                             problem);
}

PdeStepResult pde_step(FemSystem const& sys, double k, double xi,
                       fem::DiscreteField const& prev, PdeProblem const& problem,
                       NewtonConfig const& cfg)
{
    cfg.validate();
    if (!(k > 0)) throw IndexError("pde_step: step size must be positive");
    if (prev.size() != sys.mesh.interior_nodes()) {
        throw IndexError("pde_step: field size does not match the mesh");
    }

    fem::TriDiag const system = fem::TriDiag::combine(1.0, sys.mass, k, sys.stiffness);
    std::vector<double> const rhs = step_rhs(sys, k, xi, prev, problem);
    double const tol = cfg.abs_tol + cfg.rel_tol * inf_norm(rhs);

    PdeStepResult out{prev, 0, 0.0};
    std::vector<double> r = operator_residual(sys, system, k, out.field, rhs, problem);
    double rnorm = inf_norm(r);

    while (!(rnorm <= tol)) {
        if (out.iterations == cfg.max_iterations || !std::isfinite(rnorm)) {
            throw NonConvergence("pde_step: residual " + std::to_string(rnorm) + " after " +
                                 std::to_string(out.iterations) +
                                 " Newton iterations at t = " + std::to_string(xi));
        }
        fem::TriDiag jac = system;
        if (problem.nonlinearity_prime) {
            fem::TriDiag const nj = fem::assemble_nonlinearity_jacobian(
                sys.mesh, problem.nonlinearity_prime, out.field);
            jac = fem::TriDiag::combine(1.0, system, k, nj);
        }
        std::vector<double> const delta = fem::tridiag_solve(jac, r);

        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
            fem::DiscreteField trial = out.field;
            for (int i = 0; i < trial.size(); ++i) trial.values[i] -= alpha * delta[i];
            std::vector<double> rtrial = operator_residual(sys, system, k, trial, rhs, problem);
            double const tnorm = inf_norm(rtrial);
            if (tnorm < rnorm) {
                out.field = std::move(trial);
                r = std::move(rtrial);
                rnorm = tnorm;
                accepted = true;
                break;
            }
        }
        ++out.iterations;
        if (!accepted) {
            throw NonConvergence("pde_step: damped Newton update failed to reduce residual " +
                                 std::to_string(rnorm) + " at t = " + std::to_string(xi));
        }
    }
    out.residual = rnorm;
    return out;
}

PdeTrajectory pde_solve(PdeProblem const& problem, FemSystem const& sys,
                        TimeGrid const& grid, StepScheme scheme, NodeStream& stream,
                        NewtonConfig const& cfg)
{
    if (!is_implicit(scheme)) {
        throw IndexError("pde_solve: only the backward Euler schemes are available");
    }
    if (std::abs(grid.final_time() - problem.final_time) >
        1e-14 * std::abs(problem.final_time)) {
        throw IndexError("pde_solve: grid final time does not match the problem");
    }
    double const k = grid.step_size();
    int const steps = grid.steps();

    PdeTrajectory traj{grid, {}, {}, {}, {}};
    traj.fields.reserve(steps + 1);
    traj.energy_log.reserve(steps + 1);
    traj.newton_iterations.reserve(steps);
    traj.fields.push_back(fem::l2_project(sys.mesh, problem.initial));
    {
        auto const& u0 = traj.fields.front();
        traj.energy_log.push_back({sys.mass.quadratic_form(u0.view()), 0.0,
                                   sys.stiffness.quadratic_form(u0.view())});
    }

    std::vector<double> diff(sys.mesh.interior_nodes());
    for (int n = 1; n <= steps; ++n) {
        double xi = grid.node(n);
        if (is_randomized(scheme)) {
            xi = node(grid, n, stream.next_tau());
            traj.nodes_used.push_back(xi);
        }
        PdeStepResult step;
        try {
            step = pde_step(sys, k, xi, traj.fields.back(), problem, cfg);
        } catch (NonConvergence const& e) {
            throw NonConvergence(at_step(e.what(), n));
        } catch (SingularMatrix const& e) {
            throw SingularMatrix(at_step(e.what(), n));
        }
        auto const& prev = traj.fields.back();
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = step.field.values[i] - prev.values[i];
        }
        traj.energy_log.push_back({sys.mass.quadratic_form(step.field.view()),
                                   sys.mass.quadratic_form(diff),
                                   sys.stiffness.quadratic_form(step.field.view())});
        traj.newton_iterations.push_back(step.iterations);
        traj.fields.push_back(std::move(step.field));
    }
    return traj;
}

EnergyReport energy_bound_check(PdeTrajectory const& trajectory, PdeProblem const& problem)
{
    EnergyReport report;
    double const k = trajectory.grid.step_size();
    for (std::size_t n = 0; n < trajectory.energy_log.size(); ++n) {
        auto const& e = trajectory.energy_log[n];
        report.max_h_norm_sq = std::max(report.max_h_norm_sq, e.h_norm_sq);
        if (n == 0) {
            report.initial_h_norm_sq = e.h_norm_sq;
            continue;
        }
        report.sum_increment_sq += e.increment_norm_sq;
        report.dissipation += k * problem.monotonicity * e.v_norm_sq;
    }

    if (problem.forcing && !trajectory.fields.empty()) {
        // ||f||^2_{L2(0,T;H)}: 4-point Gauss in space per element, 2-point
        // Gauss in time on at least 512 panels.
        double const T = trajectory.grid.final_time();
        int const panels = std::max(trajectory.grid.steps(), 512);
        fem::Mesh const mesh(std::max(trajectory.fields.front().size(), 1));
        fem::DiscreteField const zero(mesh.interior_nodes());
        report.forcing_norm_sq = integrate(
            [&](double t) {
                double const s = fem::l2_error(mesh, zero, [&](double x) {
                    return problem.forcing(std::min(t, T), x);
                });
                return s * s;
            },
            0.0, T, 2, panels);
    }

    double const lhs = report.lhs();
    double const data = report.rhs_data(trajectory.grid.final_time());
    report.unstable = !std::isfinite(lhs) || !std::isfinite(data) || lhs > 1e6 * data;
    return report;
}

}  // namespace randstep
