// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "randstep/fem1d.hpp"
#include "randstep/pde_solver.hpp"
#include "randstep/problems.hpp"

namespace {

using namespace randstep;

void BM_TridiagSolve(benchmark::State& state)
{
    int const m = static_cast<int>(state.range(0));
    fem::Mesh const mesh(m);
    fem::TriDiag const A = fem::TriDiag::combine(1.0, fem::assemble_mass(mesh), 0.01, fem::assemble_stiffness(mesh));
    std::vector<double> rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = std::sin(0.1 * i);
    for (auto _ : state) benchmark::DoNotOptimize(fem::tridiag_solve(A, rhs));
    state.SetComplexityN(m);
}
BENCHMARK(BM_TridiagSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_ImplicitStepProtheroRobinson(benchmark::State& state)
{
    OdeProblem const p = make_prothero_robinson({});
    Vector u = p.initial_value;
    double t = 0.0;
    double const k = 0x1p-12;
    for (auto _ : state) {
        u = implicit_step(p, t, u, k).state;
        t = std::fmod(t + k, 1.0);
        benchmark::DoNotOptimize(u.data());
    }
}
BENCHMARK(BM_ImplicitStepProtheroRobinson);

void BM_PdeStep(benchmark::State& state)
{
    int const m = static_cast<int>(state.range(0));
    PdeProblem const p = make_semilinear_heat({7, SawtoothAmplitude::Pde}, {});
    FemSystem const sys{fem::Mesh(m)};
    fem::DiscreteField const u0 = fem::l2_project(sys.mesh, p.initial);
    for (auto _ : state) benchmark::DoNotOptimize(pde_step(sys, 0x1p-7, 0.3, u0, p).field.values.data());
}
BENCHMARK(BM_PdeStep)->Arg(127)->Arg(500);

void BM_PdeTrajectory(benchmark::State& state)
{
    PdeProblem const p = make_semilinear_heat({7, SawtoothAmplitude::Pde}, {});
    FemSystem const sys{fem::Mesh(127)};
    TimeGrid const grid(1.0, static_cast<int>(state.range(0)));
    std::uint64_t replica = 0;
    for (auto _ : state) {
        NodeStream stream = make_stream({42, replica++});
        benchmark::DoNotOptimize(
            pde_solve(p, sys, grid, StepScheme::RandomizedBackwardEuler, stream).fields.back().values.data());
    }
}
BENCHMARK(BM_PdeTrajectory)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
