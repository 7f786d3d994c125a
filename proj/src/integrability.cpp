#include "hirota/integrability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace hirota {

namespace {

// Forward-mode scalar carrying a value and its derivative along one
// hydrodynamic direction.
struct Dual {
    double v = 0.0;
    double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
Dual operator/(Dual a, Dual b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
Dual operator*(double s, Dual a) { return {s * a.v, s * a.d}; }
Dual operator+(double s, Dual a) { return {s + a.v, a.d}; }

}  // namespace

TripleResidual gt_residual(const Snapshot& s, const ConicPoint& pi, const ConicPoint& pj,
                           const ConicPoint& pk, double degeneracy_floor) {
    if (!s.third)
        throw std::invalid_argument("gt_residual: snapshot lacks third derivatives");
    const std::array<double, 35>& t3 = *s.third;

    double B_ik = pair_data(s, pi, pk, degeneracy_floor).B;
    double B_jk = pair_data(s, pj, pk, degeneracy_floor).B;
    double lk = pk.lambda, mk = pk.mu;

    Dual li{pi.lambda, (pi.lambda - lk) * B_ik};
    Dual mi{pi.mu, (pi.mu - mk) * B_ik};
    Dual lj{pj.lambda, (pj.lambda - lk) * B_jk};
    Dual mj{pj.mu, (pj.mu - mk) * B_jk};

    // First derivatives vary along the k-th characteristic direction via the
    // chain rule over (a, b, c, p, q) with (d a, d b, d c, d p, d q) =
    // (1, mu_k, mu_k^2, lam_k, lam_k mu_k).
    std::array<Dual, 5> f1;
    for (int X = 0; X < 5; ++X) {
        f1[static_cast<size_t>(X)] = {
            s.f1(X), s.f2(X, kVarA) + mk * s.f2(X, kVarB) + mk * mk * s.f2(X, kVarC) +
                         lk * s.f2(X, kVarP) + lk * mk * s.f2(X, kVarQ)};
    }
    std::array<Dual, 15> f2;
    for (int X = 0; X < 5; ++X)
        for (int Y = X; Y < 5; ++Y) {
            int idx = pair_index(X, Y);
            auto t = [&](int Z) { return t3[static_cast<size_t>(triple_index(X, Y, Z))]; };
            f2[static_cast<size_t>(idx)] = {
                s.second[static_cast<size_t>(idx)],
                t(kVarA) + mk * t(kVarB) + mk * mk * t(kVarC) + lk * t(kVarP) +
                    lk * mk * t(kVarQ)};
        }

    auto F2 = [&](int X, int Y) { return f2[static_cast<size_t>(pair_index(X, Y))]; };
    Dual N = F2(0, 0) + F2(0, 1) * (mi + mj) + F2(0, 2) * (mi * mi + mj * mj) +
             F2(0, 3) * (li + lj) + F2(0, 4) * (li * mi + lj * mj) + F2(1, 1) * mi * mj +
             F2(1, 2) * (mi * mj * (mi + mj)) + F2(1, 3) * (li * mj + lj * mi) +
             F2(1, 4) * (mi * mj * (li + lj)) + F2(2, 2) * (mi * mi * mj * mj) +
             F2(2, 3) * (li * mj * mj + lj * mi * mi) +
             F2(2, 4) * (mi * mj * (li * mj + lj * mi)) + F2(3, 3) * li * lj +
             F2(3, 4) * (li * lj * (mi + mj)) + F2(4, 4) * (li * lj * mi * mj);
    Dual D = -2.0 * (li * lj) + 2.0 * f1[0] + f1[1] * (mi + mj) + 2.0 * (f1[2] * mi * mj) +
             f1[3] * (li + lj) + f1[4] * (li * mj + lj * mi);

    double pscale = 1.0 + li.v * li.v + lj.v * lj.v + mi.v * mi.v + mj.v * mj.v;
    if (std::abs(D.v) <= degeneracy_floor * pscale)
        throw NumericError("gt_residual: |D_ij| below floor (resample points)");
    Dual B = N / D;

    double rhs = B.v * B_jk + B.v * B_ik - B_jk * B_ik;
    TripleResidual r;
    r.value = B.d - rhs;
    r.scale = std::max({std::abs(N.d / D.v), std::abs(N.v * D.d / (D.v * D.v)),
                        std::abs(B.v * B_jk), std::abs(B.v * B_ik), std::abs(B_jk * B_ik)});
    r.relative = std::abs(r.value) / (1.0 + r.scale);
    return r;
}

namespace {

// One equation row of the linear system over the 35 thirds: the residual at
// zero thirds, and its (constant) slope against each unit third.
void affine_row(Snapshot& s, const ConicPoint& pi, const ConicPoint& pj, const ConicPoint& pk,
                double floor, std::array<double, 35>& row, double& rhs0) {
    s.third->fill(0.0);
    rhs0 = gt_residual(s, pi, pj, pk, floor).value;
    for (int m = 0; m < 35; ++m) {
        s.third->fill(0.0);
        (*s.third)[static_cast<size_t>(m)] = 1.0;
        row[static_cast<size_t>(m)] = gt_residual(s, pi, pj, pk, floor).value - rhs0;
    }
}

}  // namespace

ThirdSolve solve_thirds(const Snapshot& s, int n_triples, std::uint64_t seed,
                        double degeneracy_floor) {
    std::mt19937_64 rng(seed);
    const int pool_size = 12;
    std::vector<ConicPoint> pool = conic_sample(s, pool_size, rng);

    Snapshot work = s;
    work.third = std::array<double, 35>{};

    int rows = 3 * n_triples;
    Eigen::MatrixXd A(rows, 35);
    Eigen::VectorXd r0(rows);
    std::uniform_int_distribution<int> pick(0, pool_size - 1);
    int row = 0;
    long long budget = 50ll * n_triples + 100;
    while (row < rows) {
        if (budget-- <= 0)
            throw NumericError("solve_thirds: could not assemble enough nondegenerate triples");
        int i = pick(rng), j = pick(rng), k = pick(rng);
        if (i == j || j == k || i == k) continue;
        const ConicPoint pts[3] = {pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)],
                                   pool[static_cast<size_t>(k)]};
        try {
            // One equation per choice of the differentiation direction k.
            for (int rot = 0; rot < 3 && row < rows; ++rot) {
                std::array<double, 35> coeffs{};
                double rhs0 = 0.0;
                affine_row(work, pts[rot % 3], pts[(rot + 1) % 3], pts[(rot + 2) % 3],
                           degeneracy_floor, coeffs, rhs0);
                for (int m = 0; m < 35; ++m) A(row, m) = coeffs[static_cast<size_t>(m)];
                r0(row) = rhs0;
                ++row;
            }
        } catch (const NumericError&) {
            continue;
        }
    }

    // Equilibrate rows and columns: residual rows and the unknowns can differ
    // by many orders of magnitude when the second derivatives are large, which
    // would otherwise wreck the relative rank threshold.
    for (int i = 0; i < rows; ++i) {
        double n = std::max(A.row(i).norm(), std::abs(r0(i)));
        if (n > 0.0) {
            A.row(i) /= n;
            r0(i) /= n;
        }
    }
    Eigen::VectorXd colscale(35);
    for (int m = 0; m < 35; ++m) {
        double n = A.col(m).norm();
        colscale(m) = n > 0.0 ? n : 1.0;
    }
    Eigen::MatrixXd As = A * colscale.cwiseInverse().asDiagonal();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    ThirdSolve out;
    out.system_rank = 0;
    for (int m = 0; m < sv.size(); ++m)
        if (sv(m) > 1e-8 * sv(0)) ++out.system_rank;
    out.condition_estimate = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                     : std::numeric_limits<double>::infinity();
    Eigen::VectorXd t = colscale.cwiseInverse().asDiagonal() * svd.solve(-r0);
    for (int m = 0; m < 35; ++m) out.thirds[static_cast<size_t>(m)] = t(m);
    out.lsq_residual = (A * t + r0).norm() / std::max(1.0, r0.norm());
    return out;
}

const char* to_string(Status s) {
    switch (s) {
        case Status::integrable: return "integrable";
        case Status::not_integrable: return "not_integrable";
        case Status::inconclusive: return "inconclusive";
        case Status::unsupported: return "unsupported";
    }
    return "?";
}

Verdict test_integrability(const JetSource& source, const Box5& box, std::uint64_t seed,
                           const VerdictConfig& cfg) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Verdict v;
    int skipped = 0;
    for (int n = 0; n < cfg.n_points; ++n) {
        std::array<double, 5> base;
        for (int m = 0; m < 5; ++m)
            base[static_cast<size_t>(m)] =
                box.lo[static_cast<size_t>(m)] +
                unit(rng) * (box.hi[static_cast<size_t>(m)] - box.lo[static_cast<size_t>(m)]);
        try {
            Jet j = source(base);
            Snapshot s = Snapshot::from_jet(j);
            if (!s.third)
                throw std::invalid_argument("test_integrability: need an order-3 jet source");
            double norm1 = 0.0;
            for (double x : s.first) norm1 += x * x;
            if (std::abs(delta(s)) <= cfg.delta_floor * (1.0 + norm1))
                throw NumericError("degenerate conic at base point");

            std::vector<ConicPoint> pool = conic_sample(s, 8, rng);
            std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
            PointDiagnostics d;
            d.base = base;
            d.delta = delta(s);
            int got = 0;
            long long budget = 30ll * cfg.n_triples;
            while (got < cfg.n_triples) {
                if (budget-- <= 0)
                    throw NumericError("test_integrability: triple sampling exhausted");
                int i = pick(rng), jx = pick(rng), k = pick(rng);
                if (i == jx || jx == k || i == k) continue;
                try {
                    TripleResidual r =
                        gt_residual(s, pool[static_cast<size_t>(i)],
                                    pool[static_cast<size_t>(jx)],
                                    pool[static_cast<size_t>(k)], cfg.degeneracy_floor);
                    d.max_relative_residual = std::max(d.max_relative_residual, r.relative);
                    ++got;
                } catch (const NumericError&) {
                }
            }

            Snapshot s2 = s;
            s2.third.reset();
            ThirdSolve ts = solve_thirds(s2, std::max(12, cfg.n_triples / 5), rng(),
                                         cfg.degeneracy_floor);
            d.solve_rank = ts.system_rank;
            double num = 0.0, den = 0.0;
            for (int m = 0; m < 35; ++m) {
                num = std::max(num, std::abs(ts.thirds[static_cast<size_t>(m)] -
                                             (*s.third)[static_cast<size_t>(m)]));
                den = std::max(den, std::abs((*s.third)[static_cast<size_t>(m)]));
            }
            d.thirds_match_relative = num / (1.0 + den);

            v.diagnostics.push_back(d);
            v.max_relative_residual = std::max(v.max_relative_residual, d.max_relative_residual);
        } catch (const std::exception& e) {
            ++skipped;
            if (v.note.empty()) v.note = e.what();
        }
    }
    v.points_tested = static_cast<int>(v.diagnostics.size());
    if (v.points_tested == 0) {
        v.status = Status::unsupported;
        if (v.note.empty()) v.note = "no admissible base points found";
        return v;
    }
    if (v.max_relative_residual < cfg.integrable_tol)
        v.status = Status::integrable;
    else if (v.max_relative_residual > cfg.not_integrable_tol)
        v.status = Status::not_integrable;
    else
        v.status = Status::inconclusive;
    if (skipped > 0 && v.note.empty()) v.note = "some base points skipped";
    return v;
}

Verdict test_integrability(const Expr& f, const Box5& box, std::uint64_t seed,
                           const VerdictConfig& cfg) {
    JetSource src = [f](const std::array<double, 5>& base) {
        return f.eval_jet(std::span<const double>(base.data(), 5), 3);
    };
    return test_integrability(src, box, seed, cfg);
}

namespace {

struct SuiteEq {
    std::string name;
    Expr lhs, rhs;
};

// Partial derivatives of f by variable-name string, cached.
class Partials {
  public:
    explicit Partials(const Expr& f) : f_(f) {}
    // key like "aac": successive derivatives in the listed variables.
    const Expr& operator()(const std::string& key) {
        std::string k = key;
        std::sort(k.begin(), k.end());
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        Expr e = k.size() == 1 ? f_.diff(std::string(1, k[0]))
                               : (*this)(k.substr(0, k.size() - 1)).diff(std::string(1, k.back()));
        return cache_.emplace(k, e).first->second;
    }

  private:
    Expr f_;
    std::map<std::string, Expr> cache_;
};

void require_independent(const Expr& f, std::initializer_list<int> banned, const char* suite) {
    for (int v : banned)
        if (f.depends_on(v))
            throw std::invalid_argument(std::string("condition_suite ") + suite +
                                        ": f depends on a variable outside the class");
}

}  // namespace

std::vector<NamedResidual> condition_suite(const Expr& f, Suite suite,
                                           std::span<const std::array<double, 5>> points) {
    Partials d(f);
    std::vector<SuiteEq> eqs;
    switch (suite) {
        case Suite::s31: {
            require_independent(f, {kVarB, kVarP, kVarQ}, "s31");
            Expr fa = d("a"), fc = d("c");
            // Denominators f_a, f_c cleared by multiplying through.
            eqs.push_back({"f_aaa", d("aaa") * fa * fc, d("aa") * (d("ac") * fa + d("aa") * fc)});
            eqs.push_back({"f_aac", d("aac") * fa * fc, d("aa") * (d("cc") * fa + d("ac") * fc)});
            eqs.push_back({"f_acc", d("acc") * fa * fc, d("cc") * (d("aa") * fc + d("ac") * fa)});
            eqs.push_back({"f_ccc", d("ccc") * fa * fc, d("cc") * (d("cc") * fa + d("ac") * fc)});
            eqs.push_back({"hessian", d("aa") * d("cc"), d("ac") * d("ac")});
            break;
        }
        case Suite::s32: {
            require_independent(f, {kVarP, kVarQ}, "s32");
            Expr fa = d("a"), fb = d("b"), fc = d("c");
            Expr two = Expr::constant(2.0, f.vars());
            Expr disc = fb * fb - two * two * fa * fc;  // f_b^2 - 4 f_a f_c
            Expr Ka = fb * d("ab") - two * fc * d("aa") - two * fa * d("ac");
            Expr Kb = fb * d("bb") - two * fc * d("ab") - two * fa * d("bc");
            Expr Kc = fb * d("bc") - two * fc * d("ac") - two * fa * d("cc");
            eqs.push_back({"rank1_ab", d("aa") * d("bb"), d("ab") * d("ab")});
            eqs.push_back({"rank1_ac", d("aa") * d("cc"), d("ac") * d("ac")});
            eqs.push_back({"rank1_bc", d("bb") * d("cc"), d("bc") * d("bc")});
            eqs.push_back({"rank1_abc", d("aa") * d("bc"), d("ab") * d("ac")});
            eqs.push_back({"rank1_bca", d("ab") * d("cc"), d("ac") * d("bc")});
            eqs.push_back({"rank1_cab", d("ab") * d("bc"), d("ac") * d("bb")});
            eqs.push_back({"f_aaa", d("aaa") * disc, two * d("aa") * Ka});
            eqs.push_back({"f_aab", d("aab") * disc, two * d("ab") * Ka});
            eqs.push_back({"f_aac", d("aac") * disc, two * d("ac") * Ka});
            eqs.push_back({"f_abb", d("abb") * disc, two * d("ab") * Kb});
            eqs.push_back({"f_acc", d("acc") * disc, two * d("ac") * Kc});
            eqs.push_back({"f_abc", d("abc") * disc, two * d("ab") * Kc});
            eqs.push_back({"f_bbb", d("bbb") * disc, two * d("bb") * Kb});
            eqs.push_back({"f_bbc", d("bbc") * disc, two * d("bc") * Kb});
            eqs.push_back({"f_bcc", d("bcc") * disc, two * d("bc") * Kc});
            eqs.push_back({"f_ccc", d("ccc") * disc, two * d("cc") * Kc});
            break;
        }
        case Suite::s33: {
            require_independent(f, {kVarA, kVarB, kVarC}, "s33");
            Expr fp = d("p"), fq = d("q");
            eqs.push_back({"f_ppp", d("ppp") * fp * fq, d("pp") * (d("pq") * fp + d("pp") * fq)});
            eqs.push_back({"f_ppq", d("ppq") * fp * fq, d("pp") * (d("qq") * fp + d("pq") * fq)});
            eqs.push_back({"f_pqq", d("pqq") * fp * fq, d("qq") * (d("pq") * fp + d("pp") * fq)});
            eqs.push_back({"f_qqq", d("qqq") * fp * fq, d("qq") * (d("qq") * fp + d("pq") * fq)});
            break;
        }
        case Suite::s34: {
            require_independent(f, {kVarC, kVarQ}, "s34");
            Expr fa = d("a"), fb = d("b"), fp = d("p");
            Expr two = Expr::constant(2.0, f.vars());
            Expr fb2 = fb * fb;
            eqs.push_back({"f_bbb", d("bbb") * fb, two * d("bb") * d("bb")});
            eqs.push_back({"f_abb", d("abb") * fb, two * d("ab") * d("bb")});
            eqs.push_back({"f_pbb", d("bbp") * fb, two * d("bp") * d("bb")});
            eqs.push_back({"f_aab", d("aab") * fb, two * d("ab") * d("ab")});
            eqs.push_back({"f_apb", d("abp") * fb, two * d("ab") * d("bp")});
            eqs.push_back({"f_ppb", d("bpp") * fb, two * d("bp") * d("bp")});
            eqs.push_back({"f_ppp", d("ppp") * fb2,
                           two * (fp * d("bp") * d("bp") +
                                  d("bp") * (fb * d("pp") + two * d("ab")) -
                                  d("bb") * (fp * d("pp") + two * d("ap")))});
            eqs.push_back({"f_app", d("app") * fb2,
                           two * (fa * d("bp") * d("bp") +
                                  d("ab") * (fb * d("pp") + d("ab")) -
                                  d("bb") * (fa * d("pp") + d("aa")))});
            eqs.push_back({"f_aap", d("aap") * fb2,
                           two * (d("bb") * (fp * d("aa") - two * fa * d("ap")) -
                                  d("ab") * (fp * d("ab") - two * fb * d("ap")) -
                                  d("bp") * (fb * d("aa") - two * fa * d("ab")))});
            eqs.push_back(
                {"f_aaa", d("aaa") * fb2,
                 two * ((fa + fp * fp) * d("ab") * d("ab") + fa * fa * d("bp") * d("bp") +
                        fb2 * (d("ap") * d("ap") - d("aa") * d("pp")) -
                        d("pp") * d("bb") * fa * fa +
                        d("ab") * fb * (d("aa") + two * (fa * d("pp") - fp * d("ap"))) +
                        two * d("bp") * (fp * (fb * d("aa") - fa * d("ab")) - fa * fb * d("ap")) -
                        d("bb") * ((fa + fp * fp) * d("aa") - two * fa * fp * d("ap")))});
            break;
        }
    }

    std::vector<NamedResidual> out;
    out.reserve(eqs.size());
    for (const SuiteEq& eq : eqs) {
        double worst = 0.0;
        for (const auto& pt : points) {
            std::span<const double> sp(pt.data(), 5);
            double L = eq.lhs.eval(sp);
            double R = eq.rhs.eval(sp);
            worst = std::max(worst, std::abs(L - R) / (1.0 + std::abs(L) + std::abs(R)));
        }
        out.push_back({eq.name, worst});
    }
    return out;
}

Jet implicit_jet(const Expr& F, const std::array<double, 6>& base, int solved_index) {
    if (F.nvars() != 6)
        throw std::invalid_argument("implicit_jet: F must be an expression in 6 variables");
    if (solved_index < 0 || solved_index > 5)
        throw std::invalid_argument("implicit_jet: solved_index out of range");
    std::span<const double> b(base.data(), 6);
    double scale = 1.0;
    for (double x : base) scale += std::abs(x);
    if (std::abs(F.eval(b)) > 1e-8 * scale)
        throw NumericError("implicit_jet: base point not on the hypersurface");
    Expr Fu = F.diff(solved_index);
    if (std::abs(Fu.eval(b)) <= 1e-6 * scale)
        throw NumericError("implicit_jet: gradient in the solved coordinate vanishes");

    std::vector<Jet> vals;
    vals.reserve(6);
    int r = 0;
    for (int i = 0; i < 6; ++i) {
        if (i == solved_index)
            vals.push_back(Jet::constant(5, 3, base[static_cast<size_t>(i)]));
        else
            vals.push_back(Jet::variable(5, 3, r++, base[static_cast<size_t>(i)]));
    }
    // Newton in the truncated algebra: each step doubles the valid order.
    for (int it = 0; it < 4; ++it) {
        Jet Fj = F.eval_jet(vals);
        Jet Du = Fu.eval_jet(vals);
        vals[static_cast<size_t>(solved_index)] =
            vals[static_cast<size_t>(solved_index)] - Fj / Du;
    }
    Jet Fj = F.eval_jet(vals);
    for (int pos = 0; pos < Fj.size(); ++pos)
        if (std::abs(Fj.coeff(pos)) > 1e-8 * scale)
            throw NumericError("implicit_jet: Newton iteration did not converge");
    return vals[static_cast<size_t>(solved_index)];
}

Jet implicit_jet_abcpq(const Expr& F, const std::array<double, 6>& base) {
    Jet g = implicit_jet(F, base, 5);
    // Remaining coordinates come out in the order (u11, u12, u13, u22, u23) =
    // (a, b, p, c, q); swap to the (a, b, c, p, q) convention.
    const int perm[5] = {0, 1, 3, 2, 4};
    return g.permute_vars(std::span<const int>(perm, 5));
}

namespace {

double det3(const std::array<std::array<double, 3>, 3>& M) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

// Index of u_ij (i <= j, 1-based) in the 6-variable order
// (u11, u12, u13, u22, u23, u33).
int sym_index(int i, int j) {
    if (i > j) std::swap(i, j);
    static const int tab[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
    return tab[i][j];
}

}  // namespace

Expr change_variables(const Expr& F, const std::array<std::array<double, 3>, 3>& L) {
    if (F.nvars() != 6)
        throw std::invalid_argument("change_variables: F must be an expression in 6 variables");
    if (std::abs(det3(L)) <= 1e-8)
        throw std::invalid_argument("change_variables: L is singular");
    // Same variable names, now read as the transformed Hessian entries.
    std::vector<Expr> ut;
    ut.reserve(6);
    for (int i = 0; i < 6; ++i) ut.push_back(Expr::var(i, F.vars()));
    // U = L^t U~ L, entry (m, n) = sum_{k,l} L_km U~_kl L_ln.
    std::vector<Expr> repl;
    repl.reserve(6);
    for (int m = 0; m < 3; ++m)
        for (int n = m; n < 3; ++n) {
            Expr e = Expr::constant(0.0, F.vars());
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double c = L[static_cast<size_t>(k)][static_cast<size_t>(m)] *
                               L[static_cast<size_t>(l)][static_cast<size_t>(n)];
                    if (c == 0.0) continue;
                    e = e + Expr::constant(c, F.vars()) * ut[static_cast<size_t>(sym_index(k, l))];
                }
            repl.push_back(e);
        }
    return F.substitute(std::span<const Expr>(repl.data(), 6));
}

std::array<double, 6> map_point_changed_vars(const std::array<double, 6>& u,
                                             const std::array<std::array<double, 3>, 3>& L) {
    // U~ = L^-t U L^-1.
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = L[static_cast<size_t>(i)][static_cast<size_t>(j)];
    Eigen::Matrix3d U;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            U(i, j) = u[static_cast<size_t>(sym_index(i, j))];
    Eigen::Matrix3d Minv = M.inverse();
    Eigen::Matrix3d Ut = Minv.transpose() * U * Minv;
    std::array<double, 6> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) out[static_cast<size_t>(sym_index(i, j))] = Ut(i, j);
    return out;
}

std::vector<std::array<double, 6>> sample_hypersurface(const Expr& F, const Box6& box, int n,
                                                       std::uint64_t seed) {
    if (F.nvars() != 6)
        throw std::invalid_argument("sample_hypersurface: F must be an expression in 6 variables");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Expr> grad;
    for (int i = 0; i < 6; ++i) grad.push_back(F.diff(i));

    std::vector<std::array<double, 6>> pts;
    pts.reserve(static_cast<size_t>(n));
    long long budget = 200ll * n;
    while (static_cast<int>(pts.size()) < n) {
        if (budget-- <= 0)
            throw NumericError("sample_hypersurface: could not find enough points in the box");
        std::array<double, 6> x;
        for (int i = 0; i < 6; ++i)
            x[static_cast<size_t>(i)] =
                box.lo[static_cast<size_t>(i)] +
                unit(rng) * (box.hi[static_cast<size_t>(i)] - box.lo[static_cast<size_t>(i)]);
        std::span<const double> sx(x.data(), 6);
        double scale = 1.0;
        for (double v : x) scale += std::abs(v);
        // Newton along the steepest coordinate.
        int best = 0;
        double gmax = 0.0;
        bool bad = false;
        try {
            for (int i = 0; i < 6; ++i) {
                double g = std::abs(grad[static_cast<size_t>(i)].eval(sx));
                if (g > gmax) { gmax = g; best = i; }
            }
        } catch (const DomainError&) {
            continue;
        }
        if (gmax <= 1e-6 * scale) continue;
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            double Fv, gv;
            try {
                Fv = F.eval(sx);
                gv = grad[static_cast<size_t>(best)].eval(sx);
            } catch (const DomainError&) {
                bad = true;
                break;
            }
            if (std::abs(gv) <= 1e-10 * scale) { bad = true; break; }
            x[static_cast<size_t>(best)] -= Fv / gv;
            if (std::abs(Fv) <= 1e-12 * scale) { ok = true; break; }
        }
        if (bad || !ok) continue;
        if (x[static_cast<size_t>(best)] < box.lo[static_cast<size_t>(best)] - 0.5 ||
            x[static_cast<size_t>(best)] > box.hi[static_cast<size_t>(best)] + 0.5)
            continue;
        pts.push_back(x);
    }
    return pts;
}

}  // namespace hirota
