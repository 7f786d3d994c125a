#pragma once

#include <array>
#include <vector>

#include "hirota/dispersion.hpp"
#include "hirota/expr.hpp"

namespace hirota {

// Symmetric 3-tensor on the 5-dim tangent space, basis (da, db, dc, dp, dq).
// Stores the 35 distinct components C_ijk (i <= j <= k) at triple_index(i,j,k);
// the full tensor is the symmetrization.
struct CubicForm {
    std::array<double, 35> comp{};

    double component(int i, int j, int k) const {
        return comp[static_cast<size_t>(triple_index(i, j, k))];
    }
    // Full trilinear evaluation sum_{ijk} C_ijk v_i w_j z_k.
    double eval(const std::array<double, 5>& v, const std::array<double, 5>& w,
                const std::array<double, 5>& z) const;
    double eval(const std::array<double, 5>& v) const { return eval(v, v, v); }
};

// Symmetric 5x5 matrix, same basis; 15 distinct entries at pair_index(i,j).
struct Metric5 {
    std::array<double, 15> comp{};

    double entry(int i, int j) const { return comp[static_cast<size_t>(pair_index(i, j))]; }
    double eval(const std::array<double, 5>& v, const std::array<double, 5>& w) const;
};

// The cubic form det dU restricted to the hypersurface via
// df = f_a da + f_b db + f_c dc + f_p dp + f_q dq, with
// U = [[a, b, p], [b, c, q], [p, q, f]].
CubicForm cubic_C(const std::array<double, 5>& first);

// The quadratic form vanishing on the tangent variety of the rank-one curve
// gamma = (1, mu, mu^2, lambda, lambda mu).
Metric5 metric_Q(const std::array<double, 5>& first);

double metric_det(const Metric5& q);

// gamma + t gamma', with lambda(mu) implicit from the dispersion relation:
// lambda' = (f_b + 2 f_c mu + f_q lambda) / (2 lambda - f_q mu - f_p).
std::array<double, 5> tangent_variety_vector(const std::array<double, 5>& first,
                                             const ConicPoint& pt, double t);

struct GeometryPointReport {
    std::array<double, 5> base{};
    double delta = 0.0;
    double det_identity_residual = 0.0;   // |det Q - 3 Delta^4|, relative
    double apolarity_residual = 0.0;      // |C~_ijk Q^kj|, relative
    double second_relation_residual = 0.0;  // symmetrized C~ Q^-1 C~ vs Q Q, relative
    double tangent_vanishing_residual = 0.0;  // Q on tangent-variety vectors
    double q_condition = 0.0;
};

struct GeometryReport {
    std::vector<GeometryPointReport> points;
    double max_det_identity_residual = 0.0;
    double max_apolarity_residual = 0.0;
    double max_second_relation_residual = 0.0;
    double max_tangent_vanishing_residual = 0.0;
    // Flat-model facts (independent of f): the curve (1 : t : t^2 : t^3 : t^4)
    // annihilates the 3x3 Hankel determinant, and the quadric
    // x0 x4 - 4 x1 x3 + 3 x2^2 vanishes on the curve's tangent variety.
    double flat_hankel_residual = 0.0;
    double flat_quadric_residual = 0.0;
};

GeometryReport geometry_report(const Expr& f, std::span<const std::array<double, 5>> bases,
                               std::uint64_t seed, double delta_floor = 1e-6);

}  // namespace hirota
