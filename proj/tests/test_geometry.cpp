#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hirota/geometry.hpp"

using namespace hirota;

namespace {
const std::vector<std::string> kVars = {"a", "b", "c", "p", "q"};

double direct_det(const std::array<double, 5>& first, const std::array<double, 5>& v) {
    double df = 0.0;
    for (int i = 0; i < 5; ++i) df += first[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    double M[3][3] = {{v[0], v[1], v[3]}, {v[1], v[2], v[4]}, {v[3], v[4], df}};
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}
}  // namespace

TEST_CASE("cubic form equals the restricted determinant") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (int t = 0; t < 20; ++t) {
        std::array<double, 5> first, v;
        for (auto& x : first) x = d(rng);
        for (auto& x : v) x = d(rng);
        CubicForm C = cubic_C(first);
        double ref = direct_det(first, v);
        CHECK(C.eval(v) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("cubic vanishes on conic directions and rank-one matrices") {
    std::array<double, 5> base = {0.2, 0.1, 0.3, -0.1, 0.2};
    Expr f = Expr::parse("b + c^2 + 0.2*exp(a) + 0.1*p*q", kVars);
    Jet j = f.eval_jet(std::span<const double>(base.data(), 5), 2);
    Snapshot s = Snapshot::from_jet(j);
    CubicForm C = cubic_C(s.first);
    for (const auto& pt : conic_sample(s, 8, 3)) {
        std::array<double, 5> v = {1.0, pt.mu, pt.mu * pt.mu, pt.lambda, pt.lambda * pt.mu};
        CHECK(std::abs(C.eval(v)) < 1e-10);
    }
    // Any rank-one direction kills the plain determinant with df = 0.
    std::array<double, 5> zero{};
    CubicForm C0 = cubic_C(zero);
    std::array<double, 5> r1 = {1.0, 0.7, 0.49, 1.3, 0.91};
    CHECK(std::abs(C0.eval(r1)) < 1e-12);
}

TEST_CASE("wave-type metric") {
    std::array<double, 5> first = {1.0, 0.0, 1.0, 0.0, 0.0};
    Metric5 Q = metric_Q(first);
    CHECK(Q.entry(0, 0) == doctest::Approx(4.0));
    CHECK(Q.entry(0, 2) == doctest::Approx(2.0));  // cross coefficient 4 dadc
    CHECK(Q.entry(1, 1) == doctest::Approx(4.0));
    CHECK(Q.entry(2, 2) == doctest::Approx(4.0));
    CHECK(Q.entry(3, 3) == doctest::Approx(-4.0));
    CHECK(Q.entry(4, 4) == doctest::Approx(-4.0));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (!((i == j) || (i == 0 && j == 2) || (i == 2 && j == 0)))
                CHECK(Q.entry(i, j) == doctest::Approx(0.0));
    CHECK(metric_det(Q) == doctest::Approx(768.0));
}

TEST_CASE("determinant identity and apolarity relations on random first derivatives") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    int done = 0;
    while (done < 200) {
        std::array<double, 5> first;
        for (auto& x : first) x = d(rng);
        double fa = first[0], fb = first[1], fc = first[2], fp = first[3], fq = first[4];
        double dlt = fb * fb + fb * fp * fq - fa * fq * fq - fc * fp * fp - 4.0 * fa * fc;
        if (std::abs(dlt) < 0.1 || std::abs(dlt) > 10.0) continue;
        ++done;

        Metric5 Q = metric_Q(first);
        CubicForm C = cubic_C(first);
        double d4 = 3.0 * dlt * dlt * dlt * dlt;
        CHECK(metric_det(Q) == doctest::Approx(d4).epsilon(1e-8));

        Eigen::Matrix<double, 5, 5> M;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) M(i, j) = Q.entry(i, j);
        Eigen::Matrix<double, 5, 5> Minv = M.inverse();
        double norm = 3.0 * std::sqrt(3.0) * dlt;
        auto ct = [&](int i, int j, int k) { return norm * C.component(i, j, k); };

        double cmax = 0.0, qmax = 0.0;
        for (int m = 0; m < 35; ++m)
            cmax = std::max(cmax, std::abs(norm * C.comp[static_cast<size_t>(m)]));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) qmax = std::max(qmax, std::abs(Minv(i, j)));

        for (int i = 0; i < 5; ++i) {
            double tr = 0.0;
            for (int k = 0; k < 5; ++k)
                for (int j = 0; j < 5; ++j) tr += ct(i, j, k) * Minv(k, j);
            CHECK(std::abs(tr) / (1.0 + cmax * qmax) < 1e-7);
        }

        // Spot-check the quadratic relation on a few index quadruples.
        std::uniform_int_distribution<int> idx(0, 4);
        for (int t = 0; t < 5; ++t) {
            int jj = idx(rng), k = idx(rng), l = idx(rng), n = idx(rng);
            double lhs = 0.0;
            for (int r = 0; r < 5; ++r)
                for (int ss = 0; ss < 5; ++ss)
                    lhs += Minv(r, ss) * (ct(jj, k, r) * ct(l, n, ss) + ct(l, jj, r) * ct(k, n, ss) +
                                          ct(k, l, r) * ct(jj, n, ss));
            double rhs = Q.entry(jj, k) * Q.entry(l, n) + Q.entry(l, jj) * Q.entry(k, n) +
                         Q.entry(k, l) * Q.entry(jj, n);
            CHECK(std::abs(lhs - rhs) / (1.0 + std::abs(rhs)) < 1e-7);
        }
    }
}

TEST_CASE("degenerate conic gives a degenerate metric") {
    std::array<double, 5> first = {1.0, 2.0, 1.0, 0.0, 0.0};  // Delta = 0
    Metric5 Q = metric_Q(first);
    CHECK(std::abs(metric_det(Q)) < 1e-10);
}

TEST_CASE("metric vanishes on the tangent variety") {
    std::array<double, 5> base = {0.3, 0.1, 0.2, 0.0, 0.1};
    Expr f = Expr::parse("ln(exp(a) + exp(c)) + 0.1*b + 0.05*q", kVars);
    Jet j = f.eval_jet(std::span<const double>(base.data(), 5), 2);
    Snapshot s = Snapshot::from_jet(j);
    Metric5 Q = metric_Q(s.first);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> td(-1.0, 1.0);
    for (const auto& pt : conic_sample(s, 6, 13)) {
        for (int t = 0; t < 3; ++t) {
            std::array<double, 5> w = tangent_variety_vector(s.first, pt, td(rng));
            double wn = 1.0;
            for (double x : w) wn += x * x;
            CHECK(std::abs(Q.eval(w, w)) / wn < 1e-10);
        }
    }
}

TEST_CASE("per-equation geometry report") {
    Expr f = Expr::parse("ln(exp(a) + exp(c))", kVars);
    std::vector<std::array<double, 5>> bases = {
        {1.0, 0.0, 1.0, 0.0, 0.0},
        {0.5, 0.0, -0.3, 0.0, 0.0},
        {-0.2, 0.0, 0.8, 0.0, 0.0},
    };
    GeometryReport rep =
        geometry_report(f, std::span<const std::array<double, 5>>(bases.data(), bases.size()), 41);
    CHECK(rep.points.size() == 3);
    CHECK(rep.max_det_identity_residual < 1e-8);
    CHECK(rep.max_apolarity_residual < 1e-8);
    CHECK(rep.max_second_relation_residual < 1e-8);
    CHECK(rep.max_tangent_vanishing_residual < 1e-8);
    CHECK(rep.flat_hankel_residual < 1e-12);
    CHECK(rep.flat_quadric_residual < 1e-12);
}
