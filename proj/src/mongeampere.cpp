#include "hirota/mongeampere.hpp"

#include <cmath>
#include <stdexcept>

namespace hirota {

Expr ma_expr(const MACoeffs& c) {
    for (double v : {c.eps, c.h[0], c.h[1], c.h[2], c.g[0], c.g[1], c.g[2], c.s[0], c.s[1],
                     c.s[2], c.tau[0], c.tau[1], c.tau[2], c.nu})
        if (!std::isfinite(v)) throw std::invalid_argument("ma_expr: non-finite coefficient");
    const std::vector<std::string> vars = {"u11", "u12", "u13", "u22", "u23", "u33"};
    auto V = [&](int i) { return Expr::var(i, vars); };
    auto K = [&](double v) { return Expr::constant(v, vars); };
    Expr u11 = V(0), u12 = V(1), u13 = V(2), u22 = V(3), u23 = V(4), u33 = V(5);
    Expr det = u11 * (u22 * u33 - u23 * u23) - u12 * (u12 * u33 - u23 * u13) +
               u13 * (u12 * u23 - u22 * u13);
    return K(c.eps) * det + K(c.h[0]) * (u22 * u33 - u23 * u23) +
           K(c.h[1]) * (u11 * u33 - u13 * u13) + K(c.h[2]) * (u11 * u22 - u12 * u12) +
           K(c.g[0]) * (u11 * u23 - u12 * u13) + K(c.g[1]) * (u22 * u13 - u12 * u23) +
           K(c.g[2]) * (u33 * u12 - u13 * u23) + K(c.s[0]) * u11 + K(c.s[1]) * u22 +
           K(c.s[2]) * u33 + K(c.tau[0]) * u23 + K(c.tau[1]) * u13 + K(c.tau[2]) * u12 +
           K(c.nu);
}

double ma_quartic(const MACoeffs& c) {
    const double e = c.eps, nu = c.nu;
    const auto &h = c.h, &g = c.g, &s = c.s, &t = c.tau;
    double gt = g[0] * t[0] + g[1] * t[1] + g[2] * t[2];
    double hs = h[0] * s[0] + h[1] * s[1] + h[2] * s[2];
    return h[0] * h[0] * s[0] * s[0] + h[1] * h[1] * s[1] * s[1] + h[2] * h[2] * s[2] * s[2] +
           g[0] * g[0] * s[1] * s[2] + g[1] * g[1] * s[0] * s[2] + g[2] * g[2] * s[0] * s[1] -
           2.0 * (h[0] * h[1] * s[0] * s[1] + h[0] * h[2] * s[0] * s[2] +
                  h[1] * h[2] * s[1] * s[2]) +
           4.0 * e * s[0] * s[1] * s[2] + 4.0 * nu * h[0] * h[1] * h[2] +
           e * t[0] * t[1] * t[2] - nu * g[0] * g[1] * g[2] - e * e * nu * nu -
           nu * (g[0] * g[0] * h[0] + g[1] * g[1] * h[1] + g[2] * g[2] * h[2]) -
           (gt + 2.0 * e * nu) * (hs - e * nu) +
           2.0 * (g[0] * h[0] * s[0] * t[0] + g[1] * h[1] * s[1] * t[1] +
                  g[2] * h[2] * s[2] * t[2]) +
           t[0] * t[0] * h[1] * h[2] + t[1] * t[1] * h[0] * h[2] + t[2] * t[2] * h[0] * h[1] -
           e * (t[0] * t[0] * s[0] + t[1] * t[1] * s[1] + t[2] * t[2] * s[2]) +
           s[0] * t[0] * g[1] * g[2] + s[1] * t[1] * g[0] * g[2] + s[2] * t[2] * g[0] * g[1] -
           (g[0] * h[0] * t[1] * t[2] + g[1] * h[1] * t[0] * t[2] + g[2] * h[2] * t[0] * t[1]);
}

double ma_quartic_reduced(const MACoeffs& c) {
    const auto &s = c.s, &t = c.tau;
    return 4.0 * s[0] * s[1] * s[2] + c.nu * c.nu + t[0] * t[1] * t[2] -
           s[0] * t[0] * t[0] - s[1] * t[1] * t[1] - s[2] * t[2] * t[2];
}

HeavenlyReduction heavenly_travelling_wave(double alpha, double gamma) {
    // alpha (u12 u13 - u11 u23) + gamma (u33 u12 - u13 u23) = 1, matched
    // against the minor pairings of ma_expr
    HeavenlyReduction r;
    r.coeffs.g = {-alpha, 0.0, gamma};
    r.coeffs.nu = -1.0;
    r.degenerate = (alpha == 0.0 && gamma == 0.0);
    r.quartic = ma_quartic(r.coeffs);
    return r;
}

}  // namespace hirota
