#pragma once

#include <array>
#include <vector>

#include "hirota/integrability.hpp"

namespace hirota {

// Vector field on the 6-dim space of symmetric matrices U = [u_ij]; the six
// components (coefficients of d/du_11, d/du_12, d/du_13, d/du_22, d/du_23,
// d/du_33) are polynomials of degree <= 2 in the u_ij.
struct Generator {
    std::array<Expr, 6> xi;
};

// Basis of the 21-dim algebra of conformal automorphisms of det dU, built
// from the infinitesimal fractional-linear action
//   delta U = b + a U + U a^t - U c U,   b, c symmetric, a arbitrary.
const std::vector<Generator>& sp6_generators();

// How far L_X(det dU) is from a scalar multiple of det dU at the point:
// fits the factor over random tangent vectors and returns the worst
// relative defect.  Zero (to roundoff) for fields in the algebra.
double conformality_residual(const Generator& g, const std::array<double, 6>& point,
                             std::uint64_t seed);

// Commutator [g, h] as a vector field (components are expressions).
Generator bracket(const Generator& g, const Generator& h);

// Relative distance of g from the span of the basis, measured by evaluating
// all fields at random points and least-squares projecting.
double span_projection_residual(const Generator& g, std::span<const Generator> basis,
                                std::uint64_t seed);

using Mat3 = std::array<std::array<double, 3>, 3>;

// Block element of the linear symplectic group acting by
// U -> (A U + B)(C U + D)^{-1}.
struct GroupElement {
    Mat3 A{}, B{}, C{}, D{};
    static GroupElement identity();
};

GroupElement translation_element(const Mat3& b_sym);  // U -> U + B
GroupElement gl3_element(const Mat3& L);              // U -> L^t U L
GroupElement shear_element(const Mat3& c_sym);        // U -> U (C U + I)^{-1}
GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
// Violation of A^t C = C^t A, B^t D = D^t B, A^t D - C^t B = id.
double group_residual(const GroupElement& g);
// A group element near the identity, composed from the three families.
GroupElement random_group_element(std::uint64_t seed, double scale);

// Point action U -> (A U + B)(C U + D)^{-1}.
std::array<double, 6> apply_group_point(const GroupElement& g, const std::array<double, 6>& u);

// Transformed equation: F~ with F~(phi_g(U)) = F(U); the 3x3 inverse enters
// the expression tree via adjugate over determinant.
Expr apply_sp6(const Expr& F, const GroupElement& g);

struct SymmetryResult {
    int dimension = 0;        // 21 - rank of the determining system
    int rank = 0;
    bool threshold_stable = true;  // rank unchanged under x10 threshold shifts
};

// Dimension of the intersection of the symmetry algebra of {F = 0} with the
// 21-dim equivalence algebra, from rows (X_1 F, ..., X_21 F) at hypersurface
// points.
SymmetryResult symmetry_dimension(const Expr& F, int n_samples, std::uint64_t seed,
                                  const Box6& box = {{-1, -1, -1, -1, -1, -1},
                                                     {1, 1, 1, 1, 1, 1}});

// A point of the second-order jet space in the chart
// x = (u_11, u_12, u_13, u_22, u_23), u = u_33.
struct JetPoint21 {
    std::array<double, 5> x{};
    double u = 0.0;
    std::array<double, 5> ui{};    // u_i
    std::array<double, 15> uij{};  // u_ij at pair_index over x-slots
};

// Reads the 2-jet of an evolutionary density f(a,b,c,p,q) at the given base
// into the x-chart above.
JetPoint21 jet_point_from_density(const Expr& f, const std::array<double, 5>& base_abcpq);

// Same, from an order >= 2 jet already in the (a,b,c,p,q) order (as produced
// by implicit_jet_abcpq for equations not solved for u_33 in closed form).
JetPoint21 jet_point_from_jet(const Jet& f_abcpq, const std::array<double, 5>& base_abcpq);

struct OrbitRankResult {
    int rank = 0;
    bool threshold_stable = true;
};

// Rank of the 21x21 matrix of prolonged-minus-transport generator
// coefficients at the jet point; third derivatives u_ijk are supplied by the
// compatibility solve on the induced snapshot.
OrbitRankResult prolong_orbit_rank(const JetPoint21& jp, std::uint64_t seed);

}  // namespace hirota
