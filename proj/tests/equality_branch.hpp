#pragma once

#include <cmath>

// Maximal solution of H = A exp(B t H) on [0, 1/(eAB)], used as the
// equality-branch oracle by the unit and acceptance suites. Solved through
// the principal Lambert branch, H = -W0(-ABt)/(Bt), with the branch-point
// series taking over near t = 1/(eAB) where Newton-type iterations stall on
// the double root.
inline double lambert_w0(double x) {
    // domain [-1/e, 0]
    double eps = x + std::exp(-1.0);
    if (eps <= 0.0) return -1.0;
    double p = std::sqrt(2.0 * std::exp(1.0) * eps);
    if (p < 1e-3) {
        // series about the branch point
        return -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p * p * p -
               (43.0 / 540.0) * p * p * p * p;
    }
    double w = -1.0 + p - p * p / 3.0; // initial guess; Halley refines
    for (int it = 0; it < 50; ++it) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double d = ew * (w + 1.0) - f * (w + 2.0) / (2.0 * (w + 1.0));
        double step = f / d;
        w -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

inline double equality_branch_solution(double A, double B, double t) {
    if (t <= 0.0) return A;
    return -lambert_w0(-A * B * t) / (B * t);
}
