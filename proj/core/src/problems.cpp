// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/problems.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "randstep/error.hpp"

namespace randstep {

namespace {

void check_unit_interval(char const* who, double t)
{
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError(std::string(who) + ": t = " + std::to_string(t) +
                          " outside [0, 1]");
    }
}

void check_mode(char const* who, SawtoothSpec const& spec, SawtoothAmplitude want)
{
    spec.validate();
    if (spec.amplitude != want) {
        throw IndexError(std::string(who) + ": wrong sawtooth amplitude mode");
    }
}

// floor(t / p) for p = 2^-K. Scaling by a power of two is exact, so binary
// grid points land on their interval index without rounding.
std::int64_t interval_index(SawtoothSpec const& spec, double t)
{
    return static_cast<std::int64_t>(std::floor(std::ldexp(t, spec.exponent)));
}

double check_point(char const* who, double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(std::string(who) + ": x = " + std::to_string(x) +
                          " outside [0, 1]");
    }
    return x;
}

}  // namespace

double SawtoothSpec::half_period() const { return std::ldexp(1.0, -exponent); }

void SawtoothSpec::validate() const
{
    if (exponent < 1 || exponent > 52) {
        throw IndexError("SawtoothSpec: exponent K must lie in [1, 52], got " +
                         std::to_string(exponent));
    }
}

void TruncatedPowerSpec::validate() const
{
    if (!(cap > 0)) throw IndexError("TruncatedPowerSpec: cap R must be positive");
    if (!(power >= 2)) throw IndexError("TruncatedPowerSpec: power must be >= 2");
}

double sawtooth_g(SawtoothSpec const& spec, double t)
{
    check_mode("sawtooth_g", spec, SawtoothAmplitude::Ode);
    check_unit_interval("sawtooth_g", t);
    std::int64_t const last = (std::int64_t{1} << spec.exponent) - 1;
    std::int64_t i = interval_index(spec, t);
    if (i > last) i = last;
    double const p = spec.half_period();
    double const r = t - static_cast<double>(i) * p;
    return (i % 2 == 1) ? p - r : r;
}

double sawtooth_gdot(SawtoothSpec const& spec, double t)
{
    check_mode("sawtooth_gdot", spec, SawtoothAmplitude::Ode);
    check_unit_interval("sawtooth_gdot", t);
    return (interval_index(spec, t) % 2 == 1) ? -1.0 : 1.0;
}

double pr_rhs(ProtheroRobinsonSpec const& spec, double t, double x)
{
    return spec.lambda * (x - sawtooth_g(spec.sawtooth, t)) +
           sawtooth_gdot(spec.sawtooth, t);
}

OdeProblem make_prothero_robinson(ProtheroRobinsonSpec const& spec)
{
    check_mode("make_prothero_robinson", spec.sawtooth, SawtoothAmplitude::Ode);
    OdeProblem problem;
    problem.rhs = [spec](double t, Vector const& x) {
        Vector out(1);
        out[0] = pr_rhs(spec, t, x[0]);
        return out;
    };
    problem.jacobian = [lambda = spec.lambda](double, Vector const&) {
        return Matrix::Constant(1, 1, lambda);
    };
    problem.initial_value = Vector::Constant(1, sawtooth_g(spec.sawtooth, 0.0));
    problem.final_time = 1.0;
    problem.one_sided_constant = spec.lambda;
    return problem;
}

double pde_w(SawtoothSpec const& spec, double t)
{
    check_mode("pde_w", spec, SawtoothAmplitude::Pde);
    check_unit_interval("pde_w", t);
    std::int64_t const last = (std::int64_t{1} << spec.exponent) - 1;
    std::int64_t i = interval_index(spec, t);
    if (i > last) i = last;
    double const P = spec.half_period();
    auto node_value = [P](std::int64_t j) {
        return (j % 2 == 1) ? static_cast<double>(j) * P * P : 0.0;
    };
    double const left = node_value(i);
    double const right = node_value(i + 1);
    double const theta = (t - static_cast<double>(i) * P) / P;
    return left + (right - left) * theta;
}

double pde_wdot(SawtoothSpec const& spec, double t)
{
    check_mode("pde_wdot", spec, SawtoothAmplitude::Pde);
    check_unit_interval("pde_wdot", t);
    // t lies in [(i-1)P, iP) with i = floor(t/P) + 1.
    std::int64_t const i = interval_index(spec, t) + 1;
    double const P = spec.half_period();
    return (i % 2 == 1) ? static_cast<double>(i) * P : -static_cast<double>(i - 1) * P;
}

double b_trunc(TruncatedPowerSpec const& spec, double x)
{
    double const a = std::abs(x);
    if (a <= spec.cap) return std::pow(a, spec.power - 2.0) * x;
    return std::pow(spec.cap, spec.power - 2.0) * x;
}

double b_trunc_prime(TruncatedPowerSpec const& spec, double x)
{
    double const a = std::abs(x);
    if (a < spec.cap) return (spec.power - 1.0) * std::pow(a, spec.power - 2.0);
    return std::pow(spec.cap, spec.power - 2.0);
}

double pde_initial(double x)
{
    constexpr double pi = std::numbers::pi;
    return std::sin(pi * check_point("pde_initial", x)) / (pi * pi);
}

double pde_exact(SawtoothSpec const& spec, double t, double x)
{
    check_point("pde_exact", x);
    return (x * x - x * x * x) * pde_w(spec, t) + pde_initial(x);
}

double pde_exact_dt(SawtoothSpec const& spec, double t, double x)
{
    check_point("pde_exact_dt", x);
    return (x * x - x * x * x) * pde_wdot(spec, t);
}

double pde_exact_dx(SawtoothSpec const& spec, double t, double x)
{
    constexpr double pi = std::numbers::pi;
    check_point("pde_exact_dx", x);
    return (2.0 * x - 3.0 * x * x) * pde_w(spec, t) + std::cos(pi * x) / pi;
}

double pde_exact_dxx(SawtoothSpec const& spec, double t, double x)
{
    constexpr double pi = std::numbers::pi;
    check_point("pde_exact_dxx", x);
    return (2.0 - 6.0 * x) * pde_w(spec, t) - std::sin(pi * x);
}

double pde_forcing(SawtoothSpec const& w_spec, TruncatedPowerSpec const& b_spec,
                   double t, double x)
{
    constexpr double pi = std::numbers::pi;
    check_point("pde_forcing", x);
    double const bubble = x * x - x * x * x;
    double const w = pde_w(w_spec, t);
    return bubble * pde_wdot(w_spec, t) - (2.0 - 6.0 * x) * w + std::sin(pi * x) +
           b_trunc(b_spec, bubble * w + pde_initial(x));
}

}  // namespace randstep
