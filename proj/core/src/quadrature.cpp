// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "randstep/error.hpp"

namespace randstep {

GaussRule gauss_legendre(int n)
{
    if (n < 1) {
        throw IndexError("gauss_legendre: need at least one point, got " +
                         std::to_string(n));
    }
    GaussRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    // Roots are symmetric; compute the upper half by Newton from the
    // Tricomi initial guess and mirror.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                double const p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double const dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double const w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

}  // namespace randstep
