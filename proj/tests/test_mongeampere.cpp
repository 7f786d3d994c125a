#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "hirota/integrability.hpp"
#include "hirota/mongeampere.hpp"
#include "hirota/symplectic.hpp"

using namespace hirota;

namespace {

const std::vector<std::string> kVars6 = {"u11", "u12", "u13", "u22", "u23", "u33"};

MACoeffs random_full(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    MACoeffs c;
    c.eps = d(rng);
    for (auto* blk : {&c.h, &c.g, &c.s, &c.tau})
        for (auto& v : *blk) v = d(rng);
    c.nu = d(rng);
    return c;
}

MACoeffs random_linear(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    MACoeffs c;
    for (auto& v : c.s) v = d(rng);
    for (auto& v : c.tau) v = d(rng);
    c.nu = d(rng);
    return c;
}

// The 14 basis functions of the minor combination, evaluated at a symmetric
// matrix given as (u11, u12, u13, u22, u23, u33).
std::array<double, 14> minor_basis(const std::array<double, 6>& u) {
    double u11 = u[0], u12 = u[1], u13 = u[2], u22 = u[3], u23 = u[4], u33 = u[5];
    double det = u11 * (u22 * u33 - u23 * u23) - u12 * (u12 * u33 - u23 * u13) +
                 u13 * (u12 * u23 - u22 * u13);
    return {det,
            u22 * u33 - u23 * u23,
            u11 * u33 - u13 * u13,
            u11 * u22 - u12 * u12,
            u11 * u23 - u12 * u13,
            u22 * u13 - u12 * u23,
            u33 * u12 - u13 * u23,
            u11, u22, u33, u23, u13, u12,
            1.0};
}

// Least-squares fit of an expression in (u11..u33) to the minor basis;
// returns the recovered coefficients and the fit residual.
std::pair<MACoeffs, double> fit_ma(const Expr& F, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const int n = 40;
    Eigen::MatrixXd M(n, 14);
    Eigen::VectorXd y(n);
    for (int r = 0; r < n; ++r) {
        std::array<double, 6> u;
        for (auto& v : u) v = d(rng);
        auto basis = minor_basis(u);
        for (int j = 0; j < 14; ++j) M(r, j) = basis[static_cast<size_t>(j)];
        y(r) = F.eval(std::span<const double>(u.data(), 6));
    }
    Eigen::VectorXd c = M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    double res = (M * c - y).norm() / (1.0 + y.norm());
    MACoeffs out;
    out.eps = c(0);
    out.h = {c(1), c(2), c(3)};
    out.g = {c(4), c(5), c(6)};
    out.s = {c(7), c(8), c(9)};
    out.tau = {c(10), c(11), c(12)};
    out.nu = c(13);
    return {out, res};
}

}  // namespace

TEST_CASE("ma_expr reproduces hand-written equations") {
    Expr det = Expr::parse(
        "u11*(u22*u33 - u23^2) - u12*(u12*u33 - u23*u13) + u13*(u12*u23 - u22*u13)", kVars6);

    MACoeffs hess1;
    hess1.eps = 1.0;
    hess1.nu = -1.0;
    Expr lhs1 = ma_expr(hess1);
    Expr ref1 = det - Expr::constant(1.0, kVars6);

    MACoeffs hessd;
    hessd.eps = 1.0;
    hessd.s = {-1.0, -1.0, -1.0};
    Expr lhsd = ma_expr(hessd);
    Expr refd = det - Expr::parse("u11 + u22 + u33", kVars6);

    MACoeffs wave;
    wave.s = {1.0, 0.0, -1.0};
    Expr lhsw = ma_expr(wave);
    Expr refw = Expr::parse("u11 - u33", kVars6);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int t = 0; t < 30; ++t) {
        std::array<double, 6> u;
        for (auto& v : u) v = d(rng);
        std::span<const double> us(u.data(), 6);
        CHECK(lhs1.eval(us) == doctest::Approx(ref1.eval(us)).epsilon(1e-12));
        CHECK(lhsd.eval(us) == doctest::Approx(refd.eval(us)).epsilon(1e-12));
        CHECK(lhsw.eval(us) == doctest::Approx(refw.eval(us)).epsilon(1e-12));
    }

    MACoeffs bad;
    bad.nu = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)ma_expr(bad), std::invalid_argument);
}

TEST_CASE("quartic vanishes on linear equations and heavenly reductions") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        MACoeffs lin = random_linear(rng);
        CHECK(std::abs(ma_quartic(lin)) < 1e-12);
    }

    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int t = 0; t < 20; ++t) {
        auto hr = heavenly_travelling_wave(d(rng), d(rng));
        CHECK(std::abs(hr.quartic) < 1e-12);
        CHECK_FALSE(hr.degenerate);
    }
    CHECK(std::abs(heavenly_travelling_wave(1.0, 1.0).quartic) < 1e-12);
    CHECK(std::abs(heavenly_travelling_wave(2.0, -3.0).quartic) < 1e-12);
    CHECK(heavenly_travelling_wave(0.0, 0.0).degenerate);
}

TEST_CASE("quartic separates the two non-linearizable determinant forms") {
    MACoeffs hess1;
    hess1.eps = 1.0;
    hess1.nu = -1.0;
    CHECK(ma_quartic(hess1) == doctest::Approx(1.0));
    CHECK(ma_quartic_reduced(hess1) == doctest::Approx(1.0));

    MACoeffs hessd;
    hessd.eps = 1.0;
    hessd.s = {-1.0, -1.0, -1.0};
    CHECK(ma_quartic(hessd) == doctest::Approx(-4.0));
    CHECK(ma_quartic_reduced(hessd) == doctest::Approx(-4.0));
}

TEST_CASE("full quartic restricts to the short form with constant one") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        MACoeffs c;
        c.eps = 1.0;
        for (auto& v : c.s) v = d(rng);
        for (auto& v : c.tau) v = d(rng);
        c.nu = d(rng);
        CHECK(std::abs(ma_quartic(c) - ma_quartic_reduced(c)) < 1e-12);
    }
}

TEST_CASE("quartic is homogeneous of degree four") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(0.2, 3.0);
    for (int t = 0; t < 30; ++t) {
        MACoeffs c = random_full(rng);
        double s = d(rng);
        MACoeffs cs = c;
        cs.eps *= s;
        cs.nu *= s;
        for (auto* blk : {&cs.h, &cs.g, &cs.s, &cs.tau})
            for (auto& v : *blk) v *= s;
        double q = ma_quartic(c);
        CHECK(std::abs(ma_quartic(cs) - s * s * s * s * q) < 1e-10 * (1.0 + std::abs(q)));
    }
}

TEST_CASE("quadratic shifts preserve the minor form and the quartic zero set") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> d(-0.4, 0.4);
    for (int t = 0; t < 5; ++t) {
        Mat3 B{};
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) B[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                B[static_cast<size_t>(j)][static_cast<size_t>(i)] = d(rng);
        GroupElement g = translation_element(B);

        // a linearizable instance stays linearizable
        auto hr = heavenly_travelling_wave(1.0 + d(rng), 1.0 + d(rng));
        Expr shifted = apply_sp6(ma_expr(hr.coeffs), g);
        auto [cz, rz] = fit_ma(shifted, 100 + static_cast<std::uint64_t>(t));
        CHECK(rz < 1e-10);
        CHECK(std::abs(ma_quartic(cz)) < 1e-10);

        // and a non-linearizable one keeps a quartic bounded away from zero
        MACoeffs hess1;
        hess1.eps = 1.0;
        hess1.nu = -1.0;
        Expr shifted1 = apply_sp6(ma_expr(hess1), g);
        auto [cn, rn] = fit_ma(shifted1, 200 + static_cast<std::uint64_t>(t));
        CHECK(rn < 1e-10);
        CHECK(std::abs(ma_quartic(cn)) > 0.1);
    }
}

TEST_CASE("determinant forms fail the hydrodynamic integrability test") {
    auto verdict_for = [](const MACoeffs& c, std::array<double, 6> base, std::uint64_t seed) {
        Expr F = ma_expr(c);
        // put the base point on the hypersurface by solving for u33
        Expr Fz = F.diff(5);
        for (int it = 0; it < 60; ++it) {
            double r = F.eval(std::span<const double>(base.data(), 6));
            if (std::abs(r) < 1e-13) break;
            base[5] -= r / Fz.eval(std::span<const double>(base.data(), 6));
        }
        JetSource src = [&F, base](const std::array<double, 5>& ab) {
            std::array<double, 6> b6 = {ab[0], ab[1], ab[3], ab[2], ab[4], base[5]};
            Expr Fz = F.diff(5);
            for (int it = 0; it < 60; ++it) {
                double r = F.eval(std::span<const double>(b6.data(), 6));
                if (std::abs(r) < 1e-13) break;
                b6[5] -= r / Fz.eval(std::span<const double>(b6.data(), 6));
            }
            return implicit_jet_abcpq(F, b6);
        };
        Box5 box{{base[0] - 0.1, base[1] - 0.1, base[3] - 0.1, base[2] - 0.1, base[4] - 0.1},
                 {base[0] + 0.1, base[1] + 0.1, base[3] + 0.1, base[2] + 0.1, base[4] + 0.1}};
        return test_integrability(src, box, seed);
    };

    // det U = 1 has hyperbolic points where the Hessian is indefinite
    MACoeffs hess1;
    hess1.eps = 1.0;
    hess1.nu = -1.0;
    CHECK(verdict_for(hess1, {1.0, 0.1, -0.1, -1.2, 0.05, 0.0}, 31).status ==
          Status::not_integrable);

    // det U = trace U is elliptic everywhere, so the hydrodynamic test cannot
    // run; the quartic (which is -4, see above) settles non-linearizability
    MACoeffs hessd;
    hessd.eps = 1.0;
    hessd.s = {-1.0, -1.0, -1.0};
    CHECK(verdict_for(hessd, {0.5, 0.1, -0.1, 0.5, 0.05, -1.3}, 37).status ==
          Status::unsupported);

    // linear equations with a non-degenerate conic pass
    MACoeffs lin;
    lin.s = {1.0, 0.3, -1.0};
    lin.tau = {0.2, -0.1, 0.4};
    lin.nu = 0.1;
    CHECK(verdict_for(lin, {0.3, 0.1, -0.2, 0.4, 0.2, 0.0}, 41).status == Status::integrable);
}
