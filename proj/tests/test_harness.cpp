// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "randstep/error.hpp"
#include "randstep/harness.hpp"

namespace randstep {
namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

OdeBenchmark quadrature_benchmark()
{
    OdeBenchmark b;
    b.problem.rhs = [](double t, Vector const&) -> Vector { return scalar(t); };
    b.problem.initial_value = scalar(0.0);
    b.exact = [](double t) { return scalar(0.5 * t * t); };
    return b;
}

OdeBenchmark pr_benchmark(double lambda, int K)
{
    ProtheroRobinsonSpec const pr{lambda, {K, SawtoothAmplitude::Ode}};
    OdeBenchmark b;
    b.problem = make_prothero_robinson(pr);
    b.exact = [s = pr.sawtooth](double t) { return scalar(sawtooth_g(s, t)); };
    return b;
}

ExperimentSpec ode_spec(OdeBenchmark b, std::vector<StepScheme> schemes, std::vector<int> exps, int replicas)
{
    ExperimentSpec spec;
    spec.benchmark = std::move(b);
    spec.schemes = std::move(schemes);
    spec.step_exponents = std::move(exps);
    spec.mc_replicas = replicas;
    return spec;
}

std::string csv(ErrorTable const& t)
{
    std::ostringstream os;
    write_error_table(os, t);
    return os.str();
}

ErrorTable synthetic(double c, double rate, StepScheme s = StepScheme::RandomizedBackwardEuler)
{
    ErrorTable t;
    for (int n = 2; n <= 8; ++n) {
        ErrorRow r{};
        r.scheme = s;
        r.steps = 1 << n;
        r.step_size = std::ldexp(1.0, -n);
        r.replicas = 1;
        r.rms_error_final = c * std::pow(r.step_size, rate);
        r.rms_error_max = 2 * r.rms_error_final;
        t.rows.push_back(r);
    }
    return t;
}

TEST(RunMc, QuadratureIdentity)
{
    ExperimentSpec spec = ode_spec(quadrature_benchmark(), {StepScheme::RandomizedBackwardEuler}, {0}, 100000);
    ErrorTable const t = run_mc(spec);
    ASSERT_EQ(t.rows.size(), 1u);
    ErrorRow const& r = t.rows[0];
    EXPECT_EQ(r.steps, 1);
    EXPECT_NEAR(r.rms_error_final, std::sqrt(1.0 / 12.0), 3 * r.mc_stderr_final);
    EXPECT_GT(r.mc_stderr_final, 0.0);
}

TEST(RunMc, DeterministicSchemeHasNoSpread)
{
    ErrorTable const t = run_mc(ode_spec(pr_benchmark(2.0, 6), {StepScheme::ClassicalBackwardEuler}, {3, 4, 5}, 17));
    for (auto const& r : t.rows) {
        EXPECT_EQ(r.mc_stderr_final, 0.0);
        EXPECT_EQ(r.replicas, 17);
        EXPECT_GE(r.rms_error_max, r.rms_error_final);
    }
}

TEST(RunMc, ZeroProblem)
{
    OdeBenchmark b;
    b.problem.rhs = [](double, Vector const& x) -> Vector { return Vector::Zero(x.size()); };
    b.problem.initial_value = scalar(2.0);
    b.exact = [](double) { return scalar(2.0); };
    for (auto const& r : run_mc(ode_spec(b, {kAllSchemes[0], kAllSchemes[1], kAllSchemes[2]}, {1, 3}, 5)).rows) {
        EXPECT_EQ(r.rms_error_final, 0.0);
        EXPECT_EQ(r.rms_error_max, 0.0);
    }
}

TEST(RunMc, OneRowPerSchemeAndStep)
{
    ErrorTable const t = run_mc(ode_spec(pr_benchmark(2.0, 6),
                                         {StepScheme::RandomizedBackwardEuler, StepScheme::ClassicalBackwardEuler},
                                         {3, 4, 5, 6}, 4));
    ASSERT_EQ(t.rows.size(), 8u);
    EXPECT_EQ(t.rows_for(StepScheme::ClassicalBackwardEuler).size(), 4u);
    EXPECT_EQ(t.rows[2].exponent(), 5);
    EXPECT_EQ(t.rows[2].steps, 32);
}

TEST(RunMc, SingleReplicaStderrUndefined)
{
    ErrorTable const t = run_mc(ode_spec(pr_benchmark(2.0, 6), {StepScheme::RandomizedBackwardEuler}, {3}, 1));
    EXPECT_TRUE(std::isnan(t.rows[0].mc_stderr_final));
}

TEST(RunMc, StandardErrorShrinksWithReplicas)
{
    ExperimentSpec spec = ode_spec(pr_benchmark(2.0, 8), {StepScheme::RandomizedBackwardEuler}, {5}, 500);
    double const se1 = run_mc(spec).rows[0].mc_stderr_final;
    spec.mc_replicas = 2000;
    double const se4 = run_mc(spec).rows[0].mc_stderr_final;
    EXPECT_NEAR(se1 / se4, 2.0, 0.6);
}

TEST(RunMc, RandomizedBeatsClassicalBeforeResolution)
{
    ErrorTable const t = run_mc(ode_spec(pr_benchmark(2.0, 8),
                                         {StepScheme::RandomizedBackwardEuler, StepScheme::ClassicalBackwardEuler},
                                         {3, 4, 5, 6}, 100));
    auto const rbe = t.rows_for(StepScheme::RandomizedBackwardEuler);
    auto const be = t.rows_for(StepScheme::ClassicalBackwardEuler);
    for (std::size_t i = 0; i < rbe.size(); ++i) EXPECT_LT(rbe[i].rms_error_final, be[i].rms_error_final);
}

TEST(RunMc, BitwiseReproducibleAcrossWorkers)
{
    ExperimentSpec spec = ode_spec(pr_benchmark(2.0, 8),
                                   {StepScheme::RandomizedBackwardEuler, StepScheme::ClassicalBackwardEuler},
                                   {3, 5, 7}, 64);
    std::string const a = csv(run_mc(spec));
    EXPECT_EQ(a, csv(run_mc(spec)));
    spec.workers = 4;
    EXPECT_EQ(a, csv(run_mc(spec)));

    PdeBenchmark pde;
    pde.problem = make_semilinear_heat({4, SawtoothAmplitude::Pde}, {});
    pde.mesh_dof = 15;
    ExperimentSpec ps;
    ps.benchmark = pde;
    ps.schemes = {StepScheme::RandomizedBackwardEuler};
    ps.step_exponents = {2, 3};
    ps.mc_replicas = 9;
    std::string const b = csv(run_mc(ps));
    ps.workers = 4;
    EXPECT_EQ(b, csv(run_mc(ps)));
}

TEST(RunMc, FailureCarriesContext)
{
    OdeBenchmark b;
    b.problem.rhs = [](double t, Vector const& x) -> Vector {
        if (t > 0.75) return (x.array().square() + 1.0).matrix();
        return Vector::Zero(1);
    };
    b.problem.initial_value = scalar(1.0);
    b.exact = [](double) { return scalar(1.0); };
    ExperimentSpec spec = ode_spec(b, {StepScheme::RandomizedBackwardEuler}, {1}, 3);
    spec.newton.max_iterations = 5;
    try {
        run_mc(spec);
        FAIL();
    } catch (NumericalError const& e) {
        std::string const msg = e.what();
        EXPECT_NE(msg.find("scheme rbe"), std::string::npos) << msg;
        EXPECT_NE(msg.find("k = 2^-1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("replica"), std::string::npos) << msg;
        EXPECT_NE(msg.find("step 2"), std::string::npos) << msg;
    }
}

TEST(ExperimentSpec, Validation)
{
    ExperimentSpec spec = ode_spec(pr_benchmark(2.0, 6), {StepScheme::RandomizedBackwardEuler}, {3, 4}, 2);
    EXPECT_NO_THROW(spec.validate());
    spec.step_exponents = {4, 4};
    EXPECT_THROW(spec.validate(), IndexError);
    spec.step_exponents = {3};
    spec.mc_replicas = 0;
    EXPECT_THROW(spec.validate(), IndexError);
    spec.mc_replicas = 1;
    spec.schemes.clear();
    EXPECT_THROW(spec.validate(), IndexError);

    ExperimentSpec ps;
    ps.benchmark = PdeBenchmark{make_semilinear_heat({4, SawtoothAmplitude::Pde}, {}), 7};
    ps.schemes = {StepScheme::RandomizedForwardEuler};
    ps.step_exponents = {2};
    EXPECT_THROW(ps.validate(), IndexError);
}

TEST(FitRate, ExactPowerLaws)
{
    RateFit const one = fit_rate(synthetic(3.0, 1.0), StepScheme::RandomizedBackwardEuler, {2, 8});
    EXPECT_NEAR(one.slope, 1.0, 1e-12);
    EXPECT_NEAR(one.intercept, std::log2(3.0), 1e-12);
    EXPECT_NEAR(one.residual, 0.0, 1e-12);
    RateFit const half = fit_rate(synthetic(0.2, 0.5), StepScheme::RandomizedBackwardEuler, {3, 6});
    EXPECT_NEAR(half.slope, 0.5, 1e-12);
    RateFit const mx = fit_rate(synthetic(1.0, 1.5), StepScheme::RandomizedBackwardEuler, {2, 8},
                                ErrorMode::MaxOverGrid);
    EXPECT_NEAR(mx.slope, 1.5, 1e-12);
    EXPECT_NEAR(mx.intercept, 1.0, 1e-12);
}

TEST(FitRate, Errors)
{
    ErrorTable t = synthetic(1.0, 1.0);
    EXPECT_THROW(fit_rate(t, StepScheme::RandomizedBackwardEuler, {8, 9}), FitError);
    EXPECT_THROW(fit_rate(t, StepScheme::ClassicalBackwardEuler, {2, 8}), FitError);
    t.rows[1].rms_error_final = 0.0;
    EXPECT_THROW(fit_rate(t, StepScheme::RandomizedBackwardEuler, {2, 8}), FitError);
    EXPECT_NO_THROW(fit_rate(t, StepScheme::RandomizedBackwardEuler, {2, 8}, ErrorMode::FinalTime, true));
    EXPECT_THROW(fit_loglog({0.5, 0.5}, {1.0, 2.0}), FitError);
}

TEST(Csv, HeaderAndRoundTrip)
{
    ErrorTable const t = synthetic(1.0, 0.7);
    std::string const text = csv(t);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "scheme,N,k,replicas,rms_error_final,rms_error_max,mc_stderr_final,mean_newton_iters");
    std::istringstream in(text);
    ErrorTable const back = read_error_table(in);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    EXPECT_EQ(csv(back), text);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].rms_error_final, t.rows[i].rms_error_final);
    }
    EXPECT_NE(text.find("rbe,4,2.5000000000000000e-01,1,"), std::string::npos);
}

TEST(Csv, RejectsMalformed)
{
    std::istringstream bad_header("a,b\n");
    EXPECT_THROW(read_error_table(bad_header), IndexError);
    std::istringstream short_row(
        "scheme,N,k,replicas,rms_error_final,rms_error_max,mc_stderr_final,mean_newton_iters\nrbe,4,0.25\n");
    EXPECT_THROW(read_error_table(short_row), IndexError);
    std::istringstream bad_scheme(
        "scheme,N,k,replicas,rms_error_final,rms_error_max,mc_stderr_final,mean_newton_iters\nxx,4,0.25,1,1,1,0,1\n");
    EXPECT_THROW(read_error_table(bad_scheme), IndexError);
}

TEST(Csv, RateFits)
{
    std::ostringstream os;
    write_rate_fits(os, {fit_rate(synthetic(1.0, 1.0), StepScheme::RandomizedBackwardEuler, {2, 8})});
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "scheme,window_lo,window_hi,slope,intercept,residual");
    EXPECT_NE(os.str().find("rbe,2,8,1.0000000000000000e+00,"), std::string::npos) << os.str();
}

TEST(ResidualStudy, StateIndependentMeanVanishes)
{
    auto const rows = residual_study(quadrature_benchmark(), {1, 4}, 50, 42, 64);
    ASSERT_EQ(rows.size(), 4u);
    for (auto const& r : rows) {
        EXPECT_NEAR(r.mean_residual, 0.0, 1e-16);
        EXPECT_GT(r.rms_residual, 0.0);
    }
}

TEST(ResidualStudy, PathwiseHalfOrderBeforeResolution)
{
    auto const rows = residual_study(pr_benchmark(2.0, 8), {4, 7}, 1000, 42, 256);
    std::vector<double> k, rms, mean;
    for (auto const& r : rows) {
        k.push_back(r.step_size);
        rms.push_back(r.rms_residual);
        mean.push_back(r.mean_residual);
    }
    EXPECT_NEAR(fit_loglog(k, rms).slope, 0.5, 0.2);
    EXPECT_NEAR(fit_loglog(k, mean).slope, 1.0, 0.2);
}

}  // namespace
}  // namespace randstep
