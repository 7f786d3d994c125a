#pragma once

#include <functional>

#include "hirota/integrability.hpp"

namespace hirota {

// One node of a Goursat grid for the pairwise-flow system
//   d_j mu^i = (mu^i - mu^j) B_ij d_j a,   d_j lam^i = (lam^i - lam^j) B_ij d_j a,
//   d_i d_j a = -2 B_ij d_i a d_j a,
//   d_i b = mu^i d_i a,  d_i c = (mu^i)^2 d_i a,  d_i p = lam^i d_i a,
//   d_i q = lam^i mu^i d_i a,  d_i (u_tt slot) = (lam^i)^2 d_i a.
struct GTNode {
    std::array<double, 5> fields{};  // (a, b, c, p, q)
    double fslot = 0.0;              // the u_tt slot, evolved independently
    std::array<double, 3> mu{}, lam{}, da{};
    std::array<double, 3> disp_residual{};  // relative conic residual per sheet
    double min_dij = 0.0;                   // smallest |D_ij| seen at the node
};

struct GTGrid {
    int n = 2;      // number of Riemann invariants (2 or 3)
    int steps = 0;  // nodes per axis = steps + 1
    double h = 0.0;
    std::vector<GTNode> nodes;  // lexicographic, last index fastest

    GTNode& at(int i, int j, int k = 0);
    const GTNode& at(int i, int j, int k = 0) const;
    double max_dispersion_residual() const;
};

using AxisFn = std::function<double(double)>;

// Goursat data: the base point, mu^i along its own axis, the lambda branch
// sign at the origin, and optionally d_i a along its own axis (default 1,
// fixing the reparametrization gauge).
struct GTBoundary {
    std::array<double, 5> base{};
    std::array<AxisFn, 3> mu_axis{};
    std::array<double, 3> lambda_branch{1.0, 1.0, 1.0};
    std::array<AxisFn, 3> da_axis{};
};

// Marches the pairwise-flow system over an n-cube of Riemann invariants with
// a midpoint predictor-corrector (second order).  Throws NumericError (with
// the node location) on conic degeneracy, small pair denominators, or a
// dispersion drift above 100 h^2.
GTGrid gt_integrate(const Expr& f, int n, const GTBoundary& bd, int steps, double h,
                    double delta_floor = 1e-6);

struct BisecantReport {
    double max_rank_measure = 0.0;    // sigma2/sigma1 of finite-difference dU
    double max_model_mismatch = 0.0;  // dU against the rank-one column model
    double max_f_residual = 0.0;      // |fslot - f(a,b,c,p,q)|
};

// At every interior node and every sheet, assembles d_i U of the symmetric
// matrix [[a,b,p],[b,c,q],[p,q,fslot]] by central differences and measures
// how far it is from rank one and from (1, mu, lam)(1, mu, lam)^t d_i a.
BisecantReport bisecant_check(const GTGrid& g, const Expr& f);

struct Consistency3 {
    std::array<double, 3> defect{};  // bracket estimate at steps h, h/2, h/4
    double predicted = 0.0;          // closed-form commutator from the pair flows
};

// Commutation probe of the three-sheet flows: estimates the mu^1 component
// of the Lie bracket of the R^2 and R^3 flows by central differences of
// step h.  The defect tends to 0 at second order (ratio 4 per halving) for
// integrable densities and to the closed-form commutator value otherwise.
Consistency3 gt_consistency3(const Expr& f, const std::array<double, 5>& base,
                             const std::array<ConicPoint, 3>& pts, double h);

struct Window {
    std::array<double, 3> lo{}, hi{};  // x, y, t
};

struct SimpleWaveReport {
    double max_system_residual = 0.0;   // the eight quasilinear equations
    double max_profile_identity = 0.0;  // |d(fslot)/dR - lam^2 a'|
    double max_newton_residual = 0.0;   // |x + mu(R) y + lam(R) t - psi(R)|
    double max_conic_residual = 0.0;    // tracked root drift along the profile
};

// One-phase solution: integrates the profile ODEs b' = mu a', c' = mu^2 a',
// p' = lam a', q' = lam mu a' along R in [r_lo, r_hi] (a(R), mu(R), psi(R)
// given as one-variable expressions, lam the tracked conic root), solves
// x + mu(R) y + lam(R) t = psi(R) for R on a grid_n^3 grid over the window,
// and reports the worst residuals.
SimpleWaveReport simple_wave(const Expr& f, const Expr& mu_R, const Expr& a_R,
                             const Expr& psi_R, const std::array<double, 5>& base,
                             double r_lo, double r_hi, const Window& win, int grid_n,
                             double lambda_branch = 1.0);

}  // namespace hirota
