// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace randstep::fem {

/// Uniform mesh of [0, 1] with m interior nodes x_i = i h, h = 1 / (m + 1).
/// Boundary nodes carry no unknowns (homogeneous Dirichlet data).
class Mesh {
  public:
    explicit Mesh(int interior_nodes);

    int interior_nodes() const { return m_; }
    int elements() const { return m_ + 1; }
    double spacing() const { return h_; }
    double node(int i) const { return i * h_; }

  private:
    int m_;
    double h_;
};

/// Tridiagonal matrix stored by diagonals. Row i reads
/// sub[i-1] x[i-1] + diag[i] x[i] + super[i] x[i+1].
struct TriDiag {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    explicit TriDiag(int n = 0) : sub(n > 0 ? n - 1 : 0), diag(n), super(n > 0 ? n - 1 : 0) {}

    int size() const { return static_cast<int>(diag.size()); }
    bool is_symmetric() const { return sub == super; }

    std::vector<double> apply(std::span<double const> x) const;
    /// x^T A x
    double quadratic_form(std::span<double const> x) const;

    /// a * A + b * B for matrices of equal size.
    static TriDiag combine(double a, TriDiag const& A, double b, TriDiag const& B);
};

/// Nodal coefficients of a P1 function vanishing at both ends.
struct DiscreteField {
    std::vector<double> values;

    DiscreteField() = default;
    explicit DiscreteField(int size) : values(size, 0.0) {}
    explicit DiscreteField(std::vector<double> v) : values(std::move(v)) {}

    int size() const { return static_cast<int>(values.size()); }
    std::span<double const> view() const { return values; }
};

using ScalarFn = std::function<double(double)>;

TriDiag assemble_mass(Mesh const& mesh);
TriDiag assemble_stiffness(Mesh const& mesh);

/// Thomas algorithm. Throws SingularMatrix when a pivot vanishes.
std::vector<double> tridiag_solve(TriDiag const& A, std::span<double const> rhs);

/// Load vector (int fn psi_i dx)_i by 4-point Gauss per element.
std::vector<double> assemble_load(Mesh const& mesh, ScalarFn const& fn);

/// H-orthogonal projection onto the P1 space: solves M c = load(fn).
DiscreteField l2_project(Mesh const& mesh, ScalarFn const& fn);

/// Nodal interpolant of fn.
DiscreteField interpolate(Mesh const& mesh, ScalarFn const& fn);

/// N(U)_i = int b(u_h) psi_i dx with 2-point Gauss per element.
std::vector<double> assemble_nonlinearity(Mesh const& mesh, ScalarFn const& b,
                                          DiscreteField const& field);

/// Exact derivative of assemble_nonlinearity with respect to the coefficients
/// (same quadrature), J_ij = int b'(u_h) psi_j psi_i dx.
TriDiag assemble_nonlinearity_jacobian(Mesh const& mesh, ScalarFn const& b_prime,
                                       DiscreteField const& field);

/// Value of the P1 function at x in [0, 1].
double evaluate(Mesh const& mesh, DiscreteField const& field, double x);

/// ||u_h - u||_{L2(0,1)} by composite Gauss with `quad_points` per element.
double l2_error(Mesh const& mesh, DiscreteField const& field, ScalarFn const& exact,
                int quad_points = 4);

/// |u_h - u|_{H1(0,1)} given the derivative u' of the exact function.
double h1_seminorm_error(Mesh const& mesh, DiscreteField const& field,
                         ScalarFn const& exact_derivative, int quad_points = 4);

}  // namespace randstep::fem
