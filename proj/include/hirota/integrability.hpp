#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hirota/dispersion.hpp"
#include "hirota/expr.hpp"

namespace hirota {

// Residual of the triple compatibility relation
//   d_k B_ij = (B_ij B_kj + B_ij B_ik - B_kj B_ik) d_k a
// with d_k a normalized to 1.
struct TripleResidual {
    double value = 0.0;  // left minus right
    double scale = 0.0;  // magnitude of the largest contributing term
    double relative = 0.0;
};

// d_k B_ij is obtained by exact forward-mode differentiation of N_ij / D_ij:
// derivatives f_X of order m vary along R^k as
//   d_k f_X = f_Xa + mu_k f_Xb + mu_k^2 f_Xc + lam_k f_Xp + lam_k mu_k f_Xq
// and the conic points vary as
//   d_k lam_i = (lam_i - lam_k) B_ik,  d_k mu_i = (mu_i - mu_k) B_ik.
// The result is affine in the 35 third-derivative entries of the snapshot.
TripleResidual gt_residual(const Snapshot& s, const ConicPoint& pi, const ConicPoint& pj,
                           const ConicPoint& pk, double degeneracy_floor = 1e-8);

// Solution of the linear system {gt_residual = 0} for the 35 third
// derivatives, assembled over randomly sampled conic-point triples (three
// equations per unordered triple, one per choice of k).
struct ThirdSolve {
    std::array<double, 35> thirds{};  // graded-lex order over (a,b,c,p,q)
    int system_rank = 0;
    double lsq_residual = 0.0;  // ||A t + r0|| / max(1, ||r0||)
    double condition_estimate = 0.0;
};

ThirdSolve solve_thirds(const Snapshot& s, int n_triples, std::uint64_t seed,
                        double degeneracy_floor = 1e-8);

enum class Status { integrable, not_integrable, inconclusive, unsupported };
const char* to_string(Status s);

struct PointDiagnostics {
    std::array<double, 5> base{};
    double delta = 0.0;
    double max_relative_residual = 0.0;
    double thirds_match_relative = 0.0;  // solved vs exact thirds
    int solve_rank = 0;
};

struct Verdict {
    Status status = Status::inconclusive;
    double max_relative_residual = 0.0;
    int points_tested = 0;
    std::vector<PointDiagnostics> diagnostics;
    std::string note;
};

struct Box5 {
    std::array<double, 5> lo{};
    std::array<double, 5> hi{};
};

struct VerdictConfig {
    int n_points = 5;
    int n_triples = 100;
    double integrable_tol = 1e-7;
    double not_integrable_tol = 1e-3;
    double degeneracy_floor = 1e-8;
    double delta_floor = 1e-6;
};

// Anything that can produce the order-3 jet of the evolutionary density
// f(a,b,c,p,q) at a requested base point (an explicit Expr, or an implicit
// equation solved on the fly).  Throws DomainError/NumericError where the
// jet does not exist.
using JetSource = std::function<Jet(const std::array<double, 5>&)>;

Verdict test_integrability(const JetSource& source, const Box5& box, std::uint64_t seed,
                           const VerdictConfig& cfg = {});
Verdict test_integrability(const Expr& f, const Box5& box, std::uint64_t seed,
                           const VerdictConfig& cfg = {});

// Closed-form third-order condition suites for the restricted equation
// classes f(a,c), f(a,b,c), f(p,q), f(a,b,p).
enum class Suite { s31, s32, s33, s34 };

struct NamedResidual {
    std::string name;
    double relative = 0.0;
};

std::vector<NamedResidual> condition_suite(const Expr& f, Suite suite,
                                           std::span<const std::array<double, 5>> points);

// Order-3 jet of the coordinate u_s solved from F(u_11,...,u_33) = 0 around a
// base point on the hypersurface, as a function of the five remaining
// coordinates (in their natural u_ij order).
Jet implicit_jet(const Expr& F, const std::array<double, 6>& base, int solved_index);

// Same, solved for u_33 and permuted to the (a,b,c,p,q) = (u_11, u_12, u_22,
// u_13, u_23) variable order used by the dispersion machinery.
Jet implicit_jet_abcpq(const Expr& F, const std::array<double, 6>& base);

// F expressed in new coordinates via U = L^t U~ L (Hessians under the linear
// change of independent variables x = L x~).
Expr change_variables(const Expr& F, const std::array<std::array<double, 3>, 3>& L);

// Maps a point of the original chart to the transformed chart, U~ = L^-t U L^-1.
std::array<double, 6> map_point_changed_vars(const std::array<double, 6>& u,
                                             const std::array<std::array<double, 3>, 3>& L);

struct Box6 {
    std::array<double, 6> lo{};
    std::array<double, 6> hi{};
};

// Samples points on the hypersurface F = 0 inside the box by Newton-solving
// for one coordinate (the one with the largest gradient component).
std::vector<std::array<double, 6>> sample_hypersurface(const Expr& F, const Box6& box, int n,
                                                       std::uint64_t seed);

}  // namespace hirota
