// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace randstep {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n - 1.
GaussRule gauss_legendre(int n);

/// Composite Gauss-Legendre integral of `fn` over [a, b] with `panels` equal
/// subintervals and `points` nodes per panel.
template <class F>
double integrate(F&& fn, double a, double b, int points, int panels = 1)
{
    GaussRule const rule = gauss_legendre(points);
    double const width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        double const lo = a + p * width;
        double const mid = lo + 0.5 * width;
        double panel = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            panel += rule.weights[q] * fn(mid + 0.5 * width * rule.points[q]);
        }
        total += 0.5 * width * panel;
    }
    return total;
}

}  // namespace randstep
