#include <random>

#include "doctest.h"
#include "hirota/symplectic.hpp"
#include "oracles.hpp"

using namespace hirota;

namespace {

const std::vector<std::string> kU = {"u11", "u12", "u13", "u22", "u23", "u33"};

Expr pe(const std::string& s) { return Expr::parse(s, kU); }

std::array<double, 6> rand_pt6(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::array<double, 6> p;
    for (auto& x : p) x = d(rng);
    return p;
}

double field_diff(const Generator& g, const std::array<Expr, 6>& want, std::mt19937_64& rng) {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        auto p = rand_pt6(rng);
        std::vector<double> pt(p.begin(), p.end());
        for (int m = 0; m < 6; ++m)
            worst = std::max(worst, std::abs(g.xi[static_cast<size_t>(m)].eval(pt) -
                                             want[static_cast<size_t>(m)].eval(pt)));
    }
    return worst;
}

Generator negate(const Generator& g) {
    Generator r;
    for (int m = 0; m < 6; ++m) r.xi[static_cast<size_t>(m)] = -g.xi[static_cast<size_t>(m)];
    return r;
}

}  // namespace

TEST_CASE("the generator basis has 21 fields, each conformal for det dU") {
    const auto& gens = sp6_generators();
    REQUIRE(gens.size() == 21);
    std::mt19937_64 rng(11);
    for (size_t b = 0; b < gens.size(); ++b) {
        for (int t = 0; t < 5; ++t) {
            auto p = rand_pt6(rng);
            CHECK(conformality_residual(gens[b], p, 100 * b + static_cast<size_t>(t)) < 1e-10);
        }
    }
}

TEST_CASE("a field outside the algebra fails the conformality test") {
    Generator bad;
    for (int m = 0; m < 6; ++m) bad.xi[static_cast<size_t>(m)] = pe("0");
    bad.xi[0] = pe("u11^2");  // quadratic but not of the -UcU shape
    std::mt19937_64 rng(12);
    auto p = rand_pt6(rng);
    CHECK(conformality_residual(bad, p, 7) > 1e-3);
}

TEST_CASE("the basis closes under commutators") {
    const auto& gens = sp6_generators();
    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = i + 1; j < gens.size(); ++j) {
            Generator br = bracket(gens[i], gens[j]);
            CHECK(span_projection_residual(br, gens, 1000 * i + j) < 1e-9);
        }
}

TEST_CASE("named fields of the algebra come out of the construction") {
    const auto& g = sp6_generators();
    std::mt19937_64 rng(21);
    auto zero = pe("0");

    // translations: unit fields in each coordinate direction
    for (int m = 0; m < 6; ++m) {
        std::array<Expr, 6> want{zero, zero, zero, zero, zero, zero};
        want[static_cast<size_t>(m)] = pe("1");
        CHECK(field_diff(g[static_cast<size_t>(m)], want, rng) == doctest::Approx(0.0));
    }

    // scaling field 2 u11 d/du11 + u12 d/du12 + u13 d/du13
    CHECK(field_diff(g[6], {pe("2*u11"), pe("u12"), pe("u13"), zero, zero, zero}, rng) < 1e-14);
    // lowering/raising fields of the linear block
    CHECK(field_diff(g[7], {pe("2*u12"), pe("u22"), pe("u23"), zero, zero, zero}, rng) < 1e-14);
    CHECK(field_diff(g[8], {pe("2*u13"), pe("u23"), pe("u33"), zero, zero, zero}, rng) < 1e-14);
    CHECK(field_diff(g[9], {zero, pe("u11"), zero, pe("2*u12"), pe("u13"), zero}, rng) < 1e-14);
    CHECK(field_diff(g[11], {zero, pe("u13"), zero, pe("2*u23"), pe("u33"), zero}, rng) < 1e-14);

    // quadratic fields (diagonal and off-diagonal second-kind generators)
    CHECK(field_diff(negate(g[15]),
                     {pe("u11^2"), pe("u11*u12"), pe("u11*u13"), pe("u12^2"), pe("u12*u13"),
                      pe("u13^2")},
                     rng) < 1e-14);
    CHECK(field_diff(negate(g[19]),
                     {pe("2*u12*u13"), pe("u12*u23+u13*u22"), pe("u12*u33+u13*u23"),
                      pe("2*u22*u23"), pe("u22*u33+u23^2"), pe("2*u23*u33")},
                     rng) < 1e-14);
}

TEST_CASE("group elements satisfy the block relations and compose correctly") {
    CHECK(group_residual(GroupElement::identity()) == doctest::Approx(0.0));
    Mat3 b{{{0.3, -0.1, 0.2}, {-0.1, 0.5, 0.0}, {0.2, 0.0, -0.4}}};
    Mat3 c{{{-0.2, 0.1, 0.0}, {0.1, 0.3, -0.1}, {0.0, -0.1, 0.2}}};
    Mat3 L{{{1.1, 0.2, -0.3}, {0.0, 0.9, 0.1}, {0.2, -0.1, 1.2}}};
    CHECK(group_residual(translation_element(b)) < 1e-14);
    CHECK(group_residual(gl3_element(L)) < 1e-14);
    CHECK(group_residual(shear_element(c)) < 1e-14);

    GroupElement g = random_group_element(5, 0.4);
    GroupElement h = random_group_element(9, 0.4);
    CHECK(group_residual(g) < 1e-12);
    CHECK(group_residual(compose(g, h)) < 1e-12);

    // compose(g, inverse(g)) is the identity
    GroupElement e = compose(g, inverse(g));
    GroupElement id = GroupElement::identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(e.A[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                  doctest::Approx(id.A[static_cast<size_t>(i)][static_cast<size_t>(j)]).epsilon(1e-12));
            CHECK(std::abs(e.B[static_cast<size_t>(i)][static_cast<size_t>(j)]) < 1e-12);
            CHECK(std::abs(e.C[static_cast<size_t>(i)][static_cast<size_t>(j)]) < 1e-12);
        }

    // point action is a group action
    std::mt19937_64 rng(33);
    for (int t = 0; t < 5; ++t) {
        auto u = rand_pt6(rng);
        auto lhs = apply_group_point(compose(g, h), u);
        auto rhs = apply_group_point(g, apply_group_point(h, u));
        for (int m = 0; m < 6; ++m)
            CHECK(lhs[static_cast<size_t>(m)] == doctest::Approx(rhs[static_cast<size_t>(m)]).epsilon(1e-9));
    }

    // the GL(3) family acts by U -> L^t U L
    auto u = rand_pt6(rng);
    auto v = apply_group_point(gl3_element(L), u);
    double U[3][3] = {{u[0], u[1], u[2]}, {u[1], u[3], u[4]}, {u[2], u[4], u[5]}};
    auto want = [&](int i, int j) {
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int t2 = 0; t2 < 3; ++t2)
                s += L[static_cast<size_t>(r)][static_cast<size_t>(i)] * U[r][t2] *
                     L[static_cast<size_t>(t2)][static_cast<size_t>(j)];
        return s;
    };
    CHECK(v[0] == doctest::Approx(want(0, 0)));
    CHECK(v[1] == doctest::Approx(want(0, 1)));
    CHECK(v[5] == doctest::Approx(want(2, 2)));
}

TEST_CASE("transforming an equation intertwines with the point action") {
    Expr F = pe("u22 - u13 + 0.5*u11^2");
    std::mt19937_64 rng(44);
    for (std::uint64_t s = 1; s <= 3; ++s) {
        GroupElement g = random_group_element(s, 0.3);
        Expr Ft = apply_sp6(F, g);
        for (int t = 0; t < 5; ++t) {
            auto u = rand_pt6(rng);
            auto gu = apply_group_point(g, u);
            std::vector<double> pu(u.begin(), u.end()), pgu(gu.begin(), gu.end());
            double lhs = Ft.eval(pgu);
            double rhs = F.eval(pu);
            CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("symmetry dimensions of the benchmark equations") {
    auto dim = [](const Expr& F, std::uint64_t seed) {
        SymmetryResult r = symmetry_dimension(F, 80, seed);
        CHECK(r.threshold_stable);
        return r.dimension;
    };
    CHECK(dim(pe("u11 + u22 - u33"), 1) == 9);
    CHECK(dim(pe("u22 - u13 + 0.5*u11^2"), 2) == 7);
    CHECK(dim(pe("u11 + u22 - exp(u33)"), 3) == 6);
    CHECK(dim(pe("exp(u11) + exp(u22) - exp(u33)"), 4) == 4);
    // determinant equations
    Expr hess = pe("u11*(u22*u33 - u23^2) - u12*(u12*u33 - u23*u13) + u13*(u12*u23 - u22*u13)");
    CHECK(dim(hess - pe("1"), 5) == 8);
    CHECK(dim(hess - pe("u11 + u22 + u33"), 6) == 8);
}

TEST_CASE("the symmetry dimension is invariant under the group action") {
    Expr F = pe("u22 - u13 + 0.5*u11^2");
    GroupElement g = random_group_element(17, 0.3);
    SymmetryResult r = symmetry_dimension(apply_sp6(F, g), 80, 7);
    CHECK(r.threshold_stable);
    CHECK(r.dimension == 7);
}

TEST_CASE("orbit rank at a generic jet point is full") {
    // 2-jet of a generic density: nothing is preserved, the orbit is open
    const std::vector<std::string> v5 = {"a", "b", "c", "p", "q"};
    Expr f = Expr::parse("0.3*a^2 + b*c - 0.2*p^2 + 0.7*q + exp(0.3*a + 0.4*c) + a*q", v5);
    JetPoint21 jp = jet_point_from_density(f, {0.4, -0.2, 0.5, 0.1, -0.3});
    OrbitRankResult r = prolong_orbit_rank(jp, 3);
    CHECK(r.threshold_stable);
    CHECK(r.rank == 21);
}

TEST_CASE("orbit ranks match the symmetry dimensions on the benchmarks") {
    const std::vector<std::string> v5 = {"a", "b", "c", "p", "q"};

    // u33 = u11 + u22: rank 21 - 9
    JetPoint21 wave = jet_point_from_density(Expr::parse("a + c", v5), {0.3, -0.1, 0.4, 0.2, -0.2});
    OrbitRankResult rw = prolong_orbit_rank(wave, 5);
    CHECK(rw.threshold_stable);
    CHECK(rw.rank == 12);

    // u33 = ln(u11 + u22): rank 21 - 6
    JetPoint21 bf = jet_point_from_density(Expr::parse("ln(a + c)", v5), {0.9, -0.1, 0.8, 0.2, -0.2});
    OrbitRankResult rb = prolong_orbit_rank(bf, 6);
    CHECK(rb.threshold_stable);
    CHECK(rb.rank == 15);

    // the dispersionless KP equation does not mention u33, so move it to a
    // generic chart with a group element first: rank 21 - 7
    Expr F = pe("u22 - u13 + 0.5*u11^2");
    GroupElement g = random_group_element(23, 0.25);
    Expr Ft = apply_sp6(F, g);
    auto base = sample_hypersurface(Ft, {{-1, -1, -1, -1, -1, -1}, {1, 1, 1, 1, 1, 1}}, 1, 31)[0];
    Jet j = implicit_jet_abcpq(Ft, base);
    JetPoint21 dkp = jet_point_from_jet(j, {base[0], base[1], base[3], base[2], base[4]});
    OrbitRankResult rd = prolong_orbit_rank(dkp, 7);
    CHECK(rd.threshold_stable);
    CHECK(rd.rank == 14);
}
