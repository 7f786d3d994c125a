#include <cmath>
#include <random>

#include "doctest.h"
#include "hirota/expr.hpp"
#include "oracles.hpp"

using namespace hirota;

namespace {
const std::vector<std::string> kAB = {"a", "b"};
const std::vector<std::string> kABC = {"a", "b", "c"};
}  // namespace

TEST_CASE("parse and eval basics") {
    Expr e = Expr::parse("a^2*sin(b) + 3/4", kAB);
    double a = 1.3, b = 0.7;
    std::vector<double> pt = {a, b};
    CHECK(e.eval(pt) == doctest::Approx(a * a * std::sin(b) + 0.75).epsilon(1e-14));

    Expr g = Expr::parse("exp(a) - 2*ln(b) + sqrt(a + b)", kAB);
    pt = {0.5, 2.0};
    CHECK(g.eval(pt) ==
          doctest::Approx(std::exp(0.5) - 2.0 * std::log(2.0) + std::sqrt(2.5)).epsilon(1e-14));

    // Right-associative power, unary minus.
    Expr h = Expr::parse("-a^2", kAB);
    pt = {3.0, 0.0};
    CHECK(h.eval(pt) == doctest::Approx(-9.0));
    Expr h2 = Expr::parse("2^3^2", kAB);
    CHECK(h2.eval(pt) == doctest::Approx(512.0));

    Expr sci = Expr::parse("1.5e2 + 2.5e-1", kAB);
    CHECK(sci.eval(pt) == doctest::Approx(150.25));
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS((void)Expr::parse("a + ", kAB), ParseError);
    CHECK_THROWS_AS((void)Expr::parse("a + zz", kAB), ParseError);
    CHECK_THROWS_AS((void)Expr::parse("frob(a)", kAB), ParseError);
    CHECK_THROWS_AS((void)Expr::parse("(a + b", kAB), ParseError);
    try {
        (void)Expr::parse("a + zz", kAB);
    } catch (const ParseError& pe) {
        CHECK(pe.position >= 4);
    }
}

TEST_CASE("derivatives against finite differences") {
    const char* exprs[] = {
        "exp(a*b) + a^3",
        "ln(2 + a + b^2)",
        "sin(a)*cos(b) + tan(a*b)",
        "sinh(a)/cosh(b) + tanh(a+b)",
        "cot(1 + a + b) + coth(1 + a^2 + b)",
        "sqrt(4 + a + a*b)",
        "(1 + a^2 + b)^1.7",
        "a/(1 + b^2) - b/(2 + a)",
    };
    std::vector<double> pt = {0.4, 0.3};
    for (const char* txt : exprs) {
        Expr e = Expr::parse(txt, kAB);
        oracle::Fn f = [&e](const std::vector<double>& x) { return e.eval(x); };
        for (int i = 0; i < 2; ++i) {
            Expr de = e.diff(i);
            CHECK(de.eval(pt) == doctest::Approx(oracle::fd1(f, pt, i)).epsilon(1e-6));
            for (int j = 0; j < 2; ++j) {
                Expr dde = de.diff(j);
                CHECK(dde.eval(pt) == doctest::Approx(oracle::fd2(f, pt, i, j)).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("general power rule") {
    // d/da a^b = a^b (b/a), d/db a^b = a^b ln a
    Expr e = Expr::parse("a^b", kAB);
    std::vector<double> pt = {1.7, 2.3};
    double v = std::pow(1.7, 2.3);
    CHECK(e.diff("a").eval(pt) == doctest::Approx(v * 2.3 / 1.7).epsilon(1e-12));
    CHECK(e.diff("b").eval(pt) == doctest::Approx(v * std::log(1.7)).epsilon(1e-12));
}

TEST_CASE("jet expansion matches symbolic derivatives") {
    Expr e = Expr::parse("exp(a)*sin(b) + c^3/(1 + a^2) + ln(2 + b + c)", kABC);
    std::vector<double> base = {0.3, -0.2, 0.5};
    Jet j = e.eval_jet(std::span<const double>(base.data(), 3), 3);
    const JetLayout& L = j.layout();
    for (int pos = 0; pos < j.size(); ++pos) {
        MultiIndex mi = L.index(pos);
        Expr de = e;
        for (int v = 0; v < 3; ++v)
            for (int r = 0; r < mi[v]; ++r) de = de.diff(v);
        CHECK(j.derivative(mi) == doctest::Approx(de.eval(base)).epsilon(1e-10));
    }
}

TEST_CASE("jet evaluation with substituted jets") {
    // e(g(x), x1) where g is itself a jet: chain rule handled by the algebra.
    Expr e = Expr::parse("exp(a) + a*b", kAB);
    Jet g = Jet::variable(2, 3, 0, 0.4) * Jet::variable(2, 3, 1, 0.6);
    Jet x1 = Jet::variable(2, 3, 1, 0.6);
    std::vector<Jet> vals = {g, x1};
    Jet composed = e.eval_jet(vals);

    Expr full = Expr::parse("exp(a*b) + a*b*b", kAB);
    std::vector<double> base = {0.4, 0.6};
    Jet ref = full.eval_jet(std::span<const double>(base.data(), 2), 3);
    for (int pos = 0; pos < ref.size(); ++pos)
        CHECK(composed.coeff(pos) == doctest::Approx(ref.coeff(pos)).epsilon(1e-12));
}

TEST_CASE("substitute and render round-trip") {
    Expr e = Expr::parse("a^2 + sin(b)*a", kAB);
    Expr ra = Expr::parse("b + 1", kAB);
    Expr rb = Expr::parse("a*b", kAB);
    std::vector<Expr> repl = {ra, rb};
    Expr s = e.substitute(std::span<const Expr>(repl.data(), 2));
    std::vector<double> pt = {0.7, 1.2};
    double av = 1.2 + 1.0, bv = 0.7 * 1.2;
    CHECK(s.eval(pt) == doctest::Approx(av * av + std::sin(bv) * av).epsilon(1e-13));

    Expr back = Expr::parse(e.render(), kAB);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> x = {d(rng), d(rng)};
        CHECK(back.eval(x) == doctest::Approx(e.eval(x)).epsilon(1e-13));
    }
}

TEST_CASE("depends_on") {
    Expr e = Expr::parse("a^2 + 1", kABC);
    CHECK(e.depends_on(0));
    CHECK(!e.depends_on(1));
    CHECK(!e.depends_on(2));
}

TEST_CASE("evaluation domain errors") {
    Expr e = Expr::parse("ln(a)", kAB);
    std::vector<double> pt = {-1.0, 0.0};
    CHECK_THROWS_AS((void)e.eval(pt), DomainError);
    Expr q = Expr::parse("1/a", kAB);
    pt = {0.0, 0.0};
    CHECK_THROWS_AS((void)q.eval(pt), DomainError);
    Expr p = Expr::parse("a^0.5", kAB);
    pt = {-2.0, 0.0};
    CHECK_THROWS_AS((void)p.eval(pt), DomainError);
    pt = {-2.0, 1.0};
    Expr jln = Expr::parse("ln(a + b)", kAB);
    std::vector<double> b2 = {-3.0, 1.0};
    CHECK_THROWS_AS((void)jln.eval_jet(std::span<const double>(b2.data(), 2), 3), DomainError);
}
