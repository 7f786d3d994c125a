#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "hirota/jet.hpp"

namespace hirota {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Variable order throughout: (a, b, c, p, q).  Second derivatives are stored
// as the 15 unordered pairs in graded-lex order (aa, ab, ac, ap, aq, bb, bc,
// bp, bq, cc, cp, cq, pp, pq, qq); third derivatives as the corresponding 35
// sorted triples.
constexpr int kVarA = 0, kVarB = 1, kVarC = 2, kVarP = 3, kVarQ = 4;

int pair_index(int i, int j);          // 0..14
int triple_index(int i, int j, int k); // 0..34

// First and second (and optionally third) derivatives of f(a,b,c,p,q) at a
// point.  The function value itself never enters any downstream formula.
struct Snapshot {
    std::array<double, 5> first{};
    std::array<double, 15> second{};
    std::optional<std::array<double, 35>> third;

    double f1(int i) const { return first[static_cast<size_t>(i)]; }
    double f2(int i, int j) const { return second[static_cast<size_t>(pair_index(i, j))]; }
    double f3(int i, int j, int k) const {
        return (*third)[static_cast<size_t>(triple_index(i, j, k))];
    }

    // Reads the derivative blocks off an order >= 2 jet in 5 variables
    // (order 3 fills the third block).
    static Snapshot from_jet(const Jet& j);
};

// A point (lambda, mu) on the dispersion conic
// lambda^2 = f_a + f_b mu + f_c mu^2 + f_p lambda + f_q lambda mu.
struct ConicPoint {
    double lambda = 0.0;
    double mu = 0.0;
};

// Residual of the conic equation at the point, relative to 1 + lambda^2 + mu^2.
double conic_residual(const Snapshot& s, const ConicPoint& pt);

// Discriminant of the dispersion conic:
// f_b^2 + f_b f_p f_q - f_a f_q^2 - f_c f_p^2 - 4 f_a f_c.
double delta(const Snapshot& s);

struct SamplerConfig {
    double mu_min = -2.0;
    double mu_max = 2.0;
    double mu_separation = 0.05;
    double degeneracy_floor = 1e-8;
};

// Draws `count` conic points with pairwise mu separation, resampling mu when
// the quadratic in lambda has no real root.  Deterministic given the seed.
std::vector<ConicPoint> conic_sample(const Snapshot& s, int count, std::uint64_t seed,
                                     const SamplerConfig& cfg = {});
std::vector<ConicPoint> conic_sample(const Snapshot& s, int count, std::mt19937_64& rng,
                                     const SamplerConfig& cfg = {});

// The pairwise quantities entering the Gibbons-Tsarev flows:
//   N = f_aa + f_ab(mu_i+mu_j) + ... (all 15 second-derivative terms),
//   D = -2 l_i l_j + 2f_a + f_b(mu_i+mu_j) + 2f_c mu_i mu_j
//       + f_p(l_i+l_j) + f_q(l_i mu_j + l_j mu_i),
//   B = N / D.
struct PairData {
    double N = 0.0;
    double D = 0.0;
    double B = 0.0;
};

PairData pair_data(const Snapshot& s, const ConicPoint& pi, const ConicPoint& pj,
                   double degeneracy_floor = 1e-8);

// Relative defect of the closed-form expression for 1/D against D itself
// (an identity modulo the dispersion relation).
double u_identity_residual(const Snapshot& s, const ConicPoint& pi, const ConicPoint& pj,
                           double degeneracy_floor = 1e-8);

}  // namespace hirota
