// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "randstep/ode_solver.hpp"

namespace randstep {

enum class SawtoothAmplitude {
    Ode,  // peaks of height p at odd multiples of p
    Pde,  // peak i * P^2 at the odd node i * P
};

/// Continuous piecewise-linear oscillation on [0, 1] with half period p = 2^-K.
struct SawtoothSpec {
    int exponent = 10;  // K
    SawtoothAmplitude amplitude = SawtoothAmplitude::Ode;

    double half_period() const;
    /// Throws IndexError unless 1 <= K <= 52.
    void validate() const;
};

struct ProtheroRobinsonSpec {
    double lambda = 2.0;
    SawtoothSpec sawtooth{10, SawtoothAmplitude::Ode};
};

/// b(x) = |x|^(p-2) x inside [-R, R], continued linearly with slope R^(p-2) outside.
struct TruncatedPowerSpec {
    double cap = 10.0;    // R
    double power = 4.0;   // p~

    void validate() const;
};

// Sawtooth g with g(ip) = p for odd i and 0 for even i.
double sawtooth_g(SawtoothSpec const& spec, double t);
// Representation of g' that is +1 on [ip, (i+1)p) for even i and -1 for odd i.
// The same formula is used at t = 1 (i = 2^K, even), so every grid point
// t = j 2^-n with n < K sees +1.
double sawtooth_gdot(SawtoothSpec const& spec, double t);

/// f(t, x) = lambda (x - g(t)) + g'(t).
double pr_rhs(ProtheroRobinsonSpec const& spec, double t, double x);

/// Prothero-Robinson IVP on [0, 1] with u0 = g(0); its exact solution is g.
OdeProblem make_prothero_robinson(ProtheroRobinsonSpec const& spec);

// Oscillating amplitude of the heat benchmark: w(iP) = i P^2 for odd i, 0 for
// even i, affine in between.
double pde_w(SawtoothSpec const& spec, double t);
// a.e. derivative of w: i P on [(i-1)P, iP) for odd i, -(i-1) P for even i.
// Evaluated with the same formula at t = 1.
double pde_wdot(SawtoothSpec const& spec, double t);

double b_trunc(TruncatedPowerSpec const& spec, double x);
/// Derivative of b_trunc; at the kink |x| = R the outer slope R^(p-2) is used.
double b_trunc_prime(TruncatedPowerSpec const& spec, double x);

// Manufactured solution u(t,x) = (x^2 - x^3) w(t) + sin(pi x) / pi^2 of
// u_t - u_xx + b(u) = f with homogeneous Dirichlet data.
double pde_exact(SawtoothSpec const& spec, double t, double x);
double pde_initial(double x);
double pde_forcing(SawtoothSpec const& w_spec, TruncatedPowerSpec const& b_spec,
                   double t, double x);

// Analytic derivatives of pde_exact, used by diagnostics and tests.
double pde_exact_dt(SawtoothSpec const& spec, double t, double x);
double pde_exact_dx(SawtoothSpec const& spec, double t, double x);
double pde_exact_dxx(SawtoothSpec const& spec, double t, double x);

}  // namespace randstep
