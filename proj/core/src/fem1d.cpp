// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "randstep/error.hpp"
#include "randstep/quadrature.hpp"

namespace randstep::fem {

namespace {

GaussRule const& rule_for(int n)
{
    static GaussRule const two = gauss_legendre(2);
    static GaussRule const four = gauss_legendre(4);
    if (n == 2) return two;
    if (n == 4) return four;
    thread_local GaussRule other;
    if (other.size() != n) other = gauss_legendre(n);
    return other;
}

void check_size(char const* who, Mesh const& mesh, int n)
{
    if (n != mesh.interior_nodes()) {
        throw IndexError(std::string(who) + ": field has " + std::to_string(n) +
                         " coefficients, mesh has " +
                         std::to_string(mesh.interior_nodes()) + " interior nodes");
    }
}

// Coefficient of global node `node` (0..m+1); boundary nodes are zero.
double coefficient(DiscreteField const& field, int node)
{
    if (node <= 0 || node > field.size()) return 0.0;
    return field.values[node - 1];
}

// Walks all elements and reference quadrature points, calling
// visit(element, x, weight, phi_left, phi_right, dphi_left, dphi_right).
template <class Visit>
void for_each_qp(Mesh const& mesh, GaussRule const& rule, Visit&& visit)
{
    double const h = mesh.spacing();
    for (int e = 0; e < mesh.elements(); ++e) {
        double const x0 = mesh.node(e);
        for (int q = 0; q < rule.size(); ++q) {
            double const s = 0.5 * (rule.points[q] + 1.0);
            double const x = x0 + h * s;
            visit(e, x, 0.5 * h * rule.weights[q], 1.0 - s, s, -1.0 / h, 1.0 / h);
        }
    }
}

}  // namespace

Mesh::Mesh(int interior_nodes) : m_{interior_nodes}, h_{1.0 / (interior_nodes + 1)}
{
    if (interior_nodes < 1) {
        throw IndexError("Mesh: need at least one interior node, got " +
                         std::to_string(interior_nodes));
    }
}

std::vector<double> TriDiag::apply(std::span<double const> x) const
{
    int const n = size();
    if (static_cast<int>(x.size()) != n) throw IndexError("TriDiag::apply: size mismatch");
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += sub[i - 1] * x[i - 1];
        if (i + 1 < n) v += super[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

double TriDiag::quadratic_form(std::span<double const> x) const
{
    std::vector<double> const ax = apply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) s += x[i] * ax[i];
    return s;
}

TriDiag TriDiag::combine(double a, TriDiag const& A, double b, TriDiag const& B)
{
    if (A.size() != B.size()) throw IndexError("TriDiag::combine: size mismatch");
    TriDiag C(A.size());
    for (int i = 0; i < A.size(); ++i) C.diag[i] = a * A.diag[i] + b * B.diag[i];
    for (std::size_t i = 0; i < A.sub.size(); ++i) {
        C.sub[i] = a * A.sub[i] + b * B.sub[i];
        C.super[i] = a * A.super[i] + b * B.super[i];
    }
    return C;
}

TriDiag assemble_mass(Mesh const& mesh)
{
    int const m = mesh.interior_nodes();
    double const h = mesh.spacing();
    TriDiag M(m);
    std::fill(M.diag.begin(), M.diag.end(), 2.0 * h / 3.0);
    std::fill(M.sub.begin(), M.sub.end(), h / 6.0);
    std::fill(M.super.begin(), M.super.end(), h / 6.0);
    return M;
}

TriDiag assemble_stiffness(Mesh const& mesh)
{
    int const m = mesh.interior_nodes();
    double const h = mesh.spacing();
    TriDiag S(m);
    std::fill(S.diag.begin(), S.diag.end(), 2.0 / h);
    std::fill(S.sub.begin(), S.sub.end(), -1.0 / h);
    std::fill(S.super.begin(), S.super.end(), -1.0 / h);
    return S;
}

std::vector<double> tridiag_solve(TriDiag const& A, std::span<double const> rhs)
{
    int const n = A.size();
    if (static_cast<int>(rhs.size()) != n || n == 0) {
        throw IndexError("tridiag_solve: size mismatch");
    }
    std::vector<double> c(n);
    std::vector<double> x(n);

    double pivot = A.diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw SingularMatrix("tridiag_solve: zero pivot in row 0");
    c[0] = n > 1 ? A.super[0] / pivot : 0.0;
    x[0] = rhs[0] / pivot;
    // Forward sweep
    for (int i = 1; i < n; ++i) {
        pivot = A.diag[i] - A.sub[i - 1] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw SingularMatrix("tridiag_solve: zero pivot in row " + std::to_string(i));
        }
        c[i] = i + 1 < n ? A.super[i] / pivot : 0.0;
        x[i] = (rhs[i] - A.sub[i - 1] * x[i - 1]) / pivot;
    }
    // Back substitution
    for (int i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
    return x;
}

std::vector<double> assemble_load(Mesh const& mesh, ScalarFn const& fn)
{
    int const m = mesh.interior_nodes();
    std::vector<double> load(m, 0.0);
    for_each_qp(mesh, rule_for(4), [&](int e, double x, double w, double phi_l,
                                       double phi_r, double, double) {
        double const v = w * fn(x);
        if (e >= 1) load[e - 1] += v * phi_l;
        if (e < m) load[e] += v * phi_r;
    });
    return load;
}

DiscreteField l2_project(Mesh const& mesh, ScalarFn const& fn)
{
    std::vector<double> const load = assemble_load(mesh, fn);
    return DiscreteField{tridiag_solve(assemble_mass(mesh), load)};
}

DiscreteField interpolate(Mesh const& mesh, ScalarFn const& fn)
{
    DiscreteField field(mesh.interior_nodes());
    for (int i = 0; i < field.size(); ++i) field.values[i] = fn(mesh.node(i + 1));
    return field;
}

std::vector<double> assemble_nonlinearity(Mesh const& mesh, ScalarFn const& b,
                                          DiscreteField const& field)
{
    int const m = mesh.interior_nodes();
    check_size("assemble_nonlinearity", mesh, field.size());
    std::vector<double> out(m, 0.0);
    for_each_qp(mesh, rule_for(2), [&](int e, double, double w, double phi_l,
                                       double phi_r, double, double) {
        double const uh = coefficient(field, e) * phi_l + coefficient(field, e + 1) * phi_r;
        double const v = w * b(uh);
        if (e >= 1) out[e - 1] += v * phi_l;
        if (e < m) out[e] += v * phi_r;
    });
    return out;
}

TriDiag assemble_nonlinearity_jacobian(Mesh const& mesh, ScalarFn const& b_prime,
                                       DiscreteField const& field)
{
    int const m = mesh.interior_nodes();
    check_size("assemble_nonlinearity_jacobian", mesh, field.size());
    TriDiag J(m);
    for_each_qp(mesh, rule_for(2), [&](int e, double, double w, double phi_l,
                                       double phi_r, double, double) {
        double const uh = coefficient(field, e) * phi_l + coefficient(field, e + 1) * phi_r;
        double const v = w * b_prime(uh);
        // Unknowns e-1 (left node) and e (right node) when interior.
        if (e >= 1) J.diag[e - 1] += v * phi_l * phi_l;
        if (e < m) J.diag[e] += v * phi_r * phi_r;
        if (e >= 1 && e < m) {
            J.super[e - 1] += v * phi_l * phi_r;
            J.sub[e - 1] += v * phi_l * phi_r;
        }
    });
    return J;
}

double evaluate(Mesh const& mesh, DiscreteField const& field, double x)
{
    check_size("evaluate", mesh, field.size());
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("evaluate: x outside [0, 1]");
    int e = static_cast<int>(std::floor(x / mesh.spacing()));
    if (e > mesh.elements() - 1) e = mesh.elements() - 1;
    double const s = (x - mesh.node(e)) / mesh.spacing();
    return coefficient(field, e) * (1.0 - s) + coefficient(field, e + 1) * s;
}

double l2_error(Mesh const& mesh, DiscreteField const& field, ScalarFn const& exact,
                int quad_points)
{
    check_size("l2_error", mesh, field.size());
    double sum = 0.0;
    for_each_qp(mesh, rule_for(quad_points), [&](int e, double x, double w,
                                                 double phi_l, double phi_r,
                                                 double, double) {
        double const uh = coefficient(field, e) * phi_l + coefficient(field, e + 1) * phi_r;
        double const d = uh - exact(x);
        sum += w * d * d;
    });
    return std::sqrt(sum);
}

double h1_seminorm_error(Mesh const& mesh, DiscreteField const& field,
                         ScalarFn const& exact_derivative, int quad_points)
{
    check_size("h1_seminorm_error", mesh, field.size());
    double sum = 0.0;
    for_each_qp(mesh, rule_for(quad_points), [&](int e, double x, double w, double,
                                                 double, double dphi_l,
                                                 double dphi_r) {
        double const duh = coefficient(field, e) * dphi_l + coefficient(field, e + 1) * dphi_r;
        double const d = duh - exact_derivative(x);
        sum += w * d * d;
    });
    return std::sqrt(sum);
}

}  // namespace randstep::fem
