// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "randstep/error.hpp"
#include "randstep/pde_solver.hpp"

namespace randstep {
namespace {

using std::numbers::pi;

// Final-time L2 error, K = 5, m = 63, N = 256, seed 42, replica 0.
constexpr double kManufacturedFixture = 2.2346960466717921e-05;

Eigen::MatrixXd dense(fem::TriDiag const& A)
{
    int const n = A.size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        D(i, i) = A.diag[i];
        if (i + 1 < n) {
            D(i, i + 1) = A.super[i];
            D(i + 1, i) = A.sub[i];
        }
    }
    return D;
}

PdeProblem heat_problem(fem::ScalarFn initial, std::function<double(double, double)> forcing)
{
    PdeProblem p;
    p.forcing = std::move(forcing);
    p.initial = std::move(initial);
    return p;
}

PdeProblem zero_problem()
{
    return heat_problem([](double) { return 0.0; }, [](double, double) { return 0.0; });
}

TEST(PdeStep, ZeroStaysZero)
{
    FemSystem const sys{fem::Mesh(15)};
    PdeStepResult const r = pde_step(sys, 0.1, 0.05, fem::DiscreteField(15), zero_problem());
    for (double v : r.field.values) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.iterations, 0);
}

TEST(PdeStep, HeatStepDissipatesAndMatchesDenseSolve)
{
    fem::Mesh const mesh(31);
    FemSystem const sys{mesh};
    fem::DiscreteField const u0 = fem::l2_project(mesh, [](double x) { return std::sin(pi * x); });
    double const k = 0.01;
    PdeStepResult const r = pde_step(sys, k, 0.0, u0, zero_problem());
    EXPECT_LT(sys.mass.quadratic_form(r.field.view()), sys.mass.quadratic_form(u0.view()));

    Eigen::MatrixXd const M = dense(sys.mass);
    Eigen::MatrixXd const S = dense(sys.stiffness);
    Eigen::Map<Eigen::VectorXd const> prev(u0.values.data(), 31);
    Eigen::VectorXd const want = (M + k * S).partialPivLu().solve(M * prev);
    for (int i = 0; i < 31; ++i) EXPECT_NEAR(r.field.values[i], want[i], 1e-10);
}

TEST(PdeStep, SemilinearResidualBelowTolerance)
{
    PdeProblem const p = make_semilinear_heat({5, SawtoothAmplitude::Pde}, {});
    fem::Mesh const mesh(40);
    FemSystem const sys{mesh};
    fem::DiscreteField prev = fem::l2_project(mesh, [](double x) { return 20 * x * (1 - x); });
    NewtonConfig const cfg;
    PdeStepResult const r = pde_step(sys, 0.05, 0.3, prev, p, cfg);
    EXPECT_GT(r.iterations, 1);
    std::vector<double> const res = pde_step_residual(sys, 0.05, 0.3, prev, r.field, p);
    double m = 0.0;
    for (double v : res) m = std::max(m, std::abs(v));
    EXPECT_LE(m, r.residual + 1e-18);
    EXPECT_LT(m, 1e-9);
}

TEST(PdeStep, RejectsBadInput)
{
    FemSystem const sys{fem::Mesh(5)};
    EXPECT_THROW(pde_step(sys, 0.0, 0.0, fem::DiscreteField(5), zero_problem()), IndexError);
    EXPECT_THROW(pde_step(sys, 0.1, 0.0, fem::DiscreteField(4), zero_problem()), IndexError);
}

TEST(PdeSolve, ZeroTrajectory)
{
    FemSystem const sys{fem::Mesh(9)};
    TimeGrid const g(1.0, 8);
    NodeStream s = make_stream({});
    PdeTrajectory const tr = pde_solve(zero_problem(), sys, g, StepScheme::RandomizedBackwardEuler, s);
    ASSERT_EQ(tr.fields.size(), 9u);
    ASSERT_EQ(tr.energy_log.size(), 9u);
    EXPECT_EQ(tr.nodes_used.size(), 8u);
    EXPECT_EQ(s.draws(), 8u);
    for (auto const& f : tr.fields) {
        for (double v : f.values) EXPECT_EQ(v, 0.0);
    }
}

TEST(PdeSolve, InitialFieldIsProjection)
{
    PdeProblem const p = make_semilinear_heat({4, SawtoothAmplitude::Pde}, {});
    fem::Mesh const mesh(20);
    FemSystem const sys{mesh};
    NodeStream s = make_stream({});
    PdeTrajectory const tr = pde_solve(p, sys, TimeGrid(1.0, 4), StepScheme::ClassicalBackwardEuler, s);
    EXPECT_EQ(tr.fields[0].values, fem::l2_project(mesh, p.initial).values);
    EXPECT_TRUE(tr.nodes_used.empty());
}

TEST(PdeSolve, RejectsExplicitScheme)
{
    FemSystem const sys{fem::Mesh(5)};
    NodeStream s = make_stream({});
    EXPECT_THROW(pde_solve(zero_problem(), sys, TimeGrid(1.0, 4), StepScheme::RandomizedForwardEuler, s),
                 IndexError);
    EXPECT_THROW(pde_solve(zero_problem(), sys, TimeGrid(2.0, 4), StepScheme::ClassicalBackwardEuler, s),
                 IndexError);
}

TEST(PdeSolve, AutonomousRandomizedMatchesClassical)
{
    PdeProblem p = heat_problem([](double x) { return x * (1 - x); },
                                [](double, double x) { return std::sin(pi * x); });
    TruncatedPowerSpec const b;
    p.nonlinearity = [b](double s) { return b_trunc(b, s); };
    p.nonlinearity_prime = [b](double s) { return b_trunc_prime(b, s); };
    FemSystem const sys{fem::Mesh(31)};
    TimeGrid const g(1.0, 32);
    NodeStream a = make_stream({1, 0});
    NodeStream c = make_stream({1, 0});
    PdeTrajectory const r = pde_solve(p, sys, g, StepScheme::RandomizedBackwardEuler, a);
    PdeTrajectory const e = pde_solve(p, sys, g, StepScheme::ClassicalBackwardEuler, c);
    for (int n = 0; n <= 32; ++n) {
        for (int i = 0; i < 31; ++i) EXPECT_NEAR(r.fields[n].values[i], e.fields[n].values[i], 1e-10);
    }
}

TEST(PdeSolve, PerStepResidualRecheck)
{
    PdeProblem const p = make_semilinear_heat({5, SawtoothAmplitude::Pde}, {});
    FemSystem const sys{fem::Mesh(31)};
    TimeGrid const g(1.0, 64);
    NodeStream s = make_stream({2, 4});
    PdeTrajectory const tr = pde_solve(p, sys, g, StepScheme::RandomizedBackwardEuler, s);
    NewtonConfig const cfg;
    for (int n = 1; n <= 64; ++n) {
        std::vector<double> const res =
            pde_step_residual(sys, g.step_size(), tr.nodes_used[n - 1], tr.fields[n - 1], tr.fields[n], p);
        double m = 0.0;
        for (double v : res) m = std::max(m, std::abs(v));
        EXPECT_LT(m, 1e-9) << n;
    }
}

TEST(PdeSolve, ManufacturedSanityCeiling)
{
    SawtoothSpec const w{5, SawtoothAmplitude::Pde};
    PdeProblem const p = make_semilinear_heat(w, {});
    fem::Mesh const mesh(63);
    FemSystem const sys{mesh};
    NodeStream s = make_stream({42, 0});
    PdeTrajectory const tr = pde_solve(p, sys, TimeGrid(1.0, 256), StepScheme::RandomizedBackwardEuler, s);
    double const err = fem::l2_error(mesh, tr.fields.back(), [&](double x) { return pde_exact(w, 1.0, x); });
    EXPECT_LT(err, 1e-2);
    EXPECT_NEAR(err, kManufacturedFixture, 1e-9 * kManufacturedFixture);
}

TEST(PdeSolve, MonotoneContraction)
{
    PdeProblem p = make_semilinear_heat({5, SawtoothAmplitude::Pde}, {});
    PdeProblem q = p;
    q.initial = [](double x) { return 3.0 * std::sin(2 * pi * x) + x * (1 - x); };
    FemSystem const sys{fem::Mesh(31)};
    TimeGrid const g(1.0, 64);
    NodeStream a = make_stream({3, 3});
    NodeStream b = make_stream({3, 3});
    PdeTrajectory const t1 = pde_solve(p, sys, g, StepScheme::RandomizedBackwardEuler, a);
    PdeTrajectory const t2 = pde_solve(q, sys, g, StepScheme::RandomizedBackwardEuler, b);
    ASSERT_EQ(t1.nodes_used, t2.nodes_used);
    double prev = INFINITY;
    std::vector<double> d(31);
    for (int n = 0; n <= 64; ++n) {
        for (int i = 0; i < 31; ++i) d[i] = t1.fields[n].values[i] - t2.fields[n].values[i];
        double const dist = std::sqrt(sys.mass.quadratic_form(d));
        EXPECT_LE(dist, prev * (1 + 1e-12)) << n;
        prev = dist;
    }
}

TEST(Energy, ZeroProblem)
{
    FemSystem const sys{fem::Mesh(9)};
    NodeStream s = make_stream({});
    PdeProblem const p = zero_problem();
    EnergyReport const rep = energy_bound_check(
        pde_solve(p, sys, TimeGrid(1.0, 8), StepScheme::RandomizedBackwardEuler, s), p);
    EXPECT_EQ(rep.max_h_norm_sq, 0.0);
    EXPECT_EQ(rep.sum_increment_sq, 0.0);
    EXPECT_EQ(rep.dissipation, 0.0);
    EXPECT_EQ(rep.initial_h_norm_sq, 0.0);
    EXPECT_EQ(rep.forcing_norm_sq, 0.0);
    EXPECT_FALSE(rep.unstable);
}

TEST(Energy, BenchmarkIsBoundedAndStableUnderRefinement)
{
    PdeProblem const p = make_semilinear_heat({5, SawtoothAmplitude::Pde}, {});
    FemSystem const sys{fem::Mesh(31)};
    double max_prev = 0.0;
    for (int steps : {32, 64, 128}) {
        NodeStream s = make_stream({42, 0});
        PdeTrajectory const tr = pde_solve(p, sys, TimeGrid(1.0, steps), StepScheme::RandomizedBackwardEuler, s);
        EnergyReport const rep = energy_bound_check(tr, p);
        EXPECT_FALSE(rep.unstable);
        EXPECT_TRUE(std::isfinite(rep.lhs()));
        EXPECT_GT(rep.forcing_norm_sq, 0.0);
        EXPECT_GT(rep.dissipation, 0.0);
        if (max_prev > 0) EXPECT_LT(std::abs(rep.max_h_norm_sq - max_prev) / max_prev, 0.5);
        max_prev = rep.max_h_norm_sq;
    }
}

TEST(Energy, ForcingNormQuadrature)
{
    // f = sin(pi x) constant in time: ||f||^2_{L2(0,1;L2)} = 1/2.
    PdeProblem const p = heat_problem([](double) { return 0.0; },
                                      [](double, double x) { return std::sin(pi * x); });
    FemSystem const sys{fem::Mesh(63)};
    NodeStream s = make_stream({});
    EnergyReport const rep =
        energy_bound_check(pde_solve(p, sys, TimeGrid(1.0, 4), StepScheme::ClassicalBackwardEuler, s), p);
    EXPECT_NEAR(rep.forcing_norm_sq, 0.5, 1e-8);
}

TEST(Energy, FlagsBlowUp)
{
    PdeTrajectory tr{TimeGrid(1.0, 1), {fem::DiscreteField(3), fem::DiscreteField(3)}, {}, {}, {}};
    tr.energy_log = {{0.0, 0.0, 0.0}, {1e12, 1e12, 0.0}};
    EXPECT_TRUE(energy_bound_check(tr, zero_problem()).unstable);
}

}  // namespace
}  // namespace randstep
