#pragma once

#include <array>

#include "hirota/expr.hpp"

namespace hirota {

// Coefficients of the constant-coefficient minor combination
//   eps det U + h_1 (u22 u33 - u23^2) + h_2 (u11 u33 - u13^2) + h_3 (u11 u22 - u12^2)
//   + g_1 (u11 u23 - u12 u13) + g_2 (u22 u13 - u12 u23) + g_3 (u33 u12 - u13 u23)
//   + s_1 u11 + s_2 u22 + s_3 u33 + tau_1 u23 + tau_2 u13 + tau_3 u12 + nu = 0.
struct MACoeffs {
    double eps = 0.0;
    std::array<double, 3> h{}, g{}, s{}, tau{};
    double nu = 0.0;
};

// The equation above as an expression in (u11, u12, u13, u22, u23, u33).
Expr ma_expr(const MACoeffs& c);

// Degree-4 dual-variety polynomial in the 14 coefficients; the equation is
// linearizable (equivalently, integrable) exactly when it vanishes.
double ma_quartic(const MACoeffs& c);

// The short form valid after the second-order minors have been removed
// (eps = 1, h = g = 0):  4 s1 s2 s3 + nu^2 + tau1 tau2 tau3 - s1 tau1^2
// - s2 tau2^2 - s3 tau3^2.  ma_quartic restricts to exactly this on that
// slice (proportionality constant 1, checked in the tests).
double ma_quartic_reduced(const MACoeffs& c);

// Travelling-wave reduction u(x + alpha t, y + beta t, z + gamma t) of
// u_xy u_zt - u_xt u_zy = 1: a three-dimensional equation of the above form
// with eps = 0, g = (-alpha, 0, gamma), nu = -1.  Returns the coefficients
// and the quartic value (zero for every alpha, gamma: the reduction is
// linearizable).  degenerate is set when alpha = gamma = 0 (the reduction
// collapses to 0 = 1).
struct HeavenlyReduction {
    MACoeffs coeffs;
    double quartic = 0.0;
    bool degenerate = false;
};
HeavenlyReduction heavenly_travelling_wave(double alpha, double gamma);

}  // namespace hirota
