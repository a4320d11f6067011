#pragma once

#include <array>
#include <complex>
#include <utility>

#include "awl/kernels.hpp"

namespace awl {

// Closed-form matrix functions for real 2x2 systems dx = A x dt + G dW,
// branch-stable across oscillatory / overdamped / critically damped cases.

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    Vec2 apply(Vec2 v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
};

// e^{A h}
Mat2 expm(const Mat2& A, double h);

// int_0^h e^{A s} ds  (no invertibility assumption on A)
Mat2 phi1(const Mat2& A, double h);

// Kernels of the impulse response K(tau) = e^{A tau} (0, g)^T, as
// exponential sums; exact, with a polynomial-series representation near
// the double eigenvalue.
std::pair<ExpSum, ExpSum> impulse_kernels(const Mat2& A, double g);

// One-step covariance of the stochastic convolution
// int_0^h e^{A s} G G^T e^{A^T s} ds with G = (0, g)^T; symmetric PSD.
std::array<double, 3> conv_cov(const Mat2& A, double g, double h);

// Simpson-rule evaluation of the same covariance (fallback used near the
// critically damped double root).
std::array<double, 3> conv_cov_quadrature(const Mat2& A, double g, double h,
                                          int panels = 256);

}  // namespace awl
