#include "hirota/symplectic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace hirota {

namespace {

const std::vector<std::string>& u6_names() {
    static const std::vector<std::string> names = {"u11", "u12", "u13", "u22", "u23", "u33"};
    return names;
}

int sym_index(int i, int j) {
    if (i > j) std::swap(i, j);
    static const int tab[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
    return tab[i][j];
}

// x-chart slot i corresponds to this index in the (a,b,c,p,q) ordering of the
// dispersion machinery: x = (u11, u12, u13, u22, u23) = (a, b, p, c, q).
constexpr int kToAbcpq[5] = {0, 1, 3, 2, 4};

Generator from_delta(const std::array<std::array<Expr, 3>, 3>& dU) {
    Generator g;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) g.xi[static_cast<size_t>(sym_index(i, j))] = dU[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return g;
}

std::vector<Generator> build_generators() {
    const auto& vars = u6_names();
    std::array<std::array<Expr, 3>, 3> U;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) U[static_cast<size_t>(i)][static_cast<size_t>(j)] = Expr::var(sym_index(i, j), vars);
    Expr zero = Expr::constant(0.0, vars);
    Expr one = Expr::constant(1.0, vars);

    std::vector<Generator> out;
    out.reserve(21);

    // b-block: delta U = b, b = E_kl + E_lk (k <= l).
    for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) {
            std::array<std::array<Expr, 3>, 3> dU;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    dU[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        ((i == k && j == l) || (i == l && j == k)) ? one : zero;
            out.push_back(from_delta(dU));
        }

    // a-block: a = E_kl, delta U = a U + U a^t.
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            std::array<std::array<Expr, 3>, 3> dU;
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n) {
                    Expr e = zero;
                    if (m == k) e = e + U[static_cast<size_t>(l)][static_cast<size_t>(n)];
                    if (n == k) e = e + U[static_cast<size_t>(m)][static_cast<size_t>(l)];
                    dU[static_cast<size_t>(m)][static_cast<size_t>(n)] = e;
                }
            out.push_back(from_delta(dU));
        }

    // c-block: c = E_kl + E_lk (or E_kk), delta U = -U c U.
    for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) {
            std::array<std::array<Expr, 3>, 3> dU;
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n) {
                    Expr e = -(U[static_cast<size_t>(m)][static_cast<size_t>(k)] *
                               U[static_cast<size_t>(l)][static_cast<size_t>(n)]);
                    if (k != l)
                        e = e - U[static_cast<size_t>(m)][static_cast<size_t>(l)] *
                                    U[static_cast<size_t>(k)][static_cast<size_t>(n)];
                    dU[static_cast<size_t>(m)][static_cast<size_t>(n)] = e;
                }
            out.push_back(from_delta(dU));
        }
    return out;
}

double det_sym6(const std::array<double, 6>& v) {
    // v holds (w11, w12, w13, w22, w23, w33)
    double M[3][3] = {{v[0], v[1], v[2]}, {v[1], v[3], v[4]}, {v[2], v[4], v[5]}};
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

// Polarized determinant trilinear form.
double det_trilinear(const std::array<double, 6>& x, const std::array<double, 6>& y,
                     const std::array<double, 6>& z) {
    auto plus = [](std::array<double, 6> a, const std::array<double, 6>& b) {
        for (int i = 0; i < 6; ++i) a[static_cast<size_t>(i)] += b[static_cast<size_t>(i)];
        return a;
    };
    return (det_sym6(plus(plus(x, y), z)) - det_sym6(plus(x, y)) - det_sym6(plus(x, z)) -
            det_sym6(plus(y, z)) + det_sym6(x) + det_sym6(y) + det_sym6(z)) /
           6.0;
}

Eigen::Matrix3d to_eigen(const Mat3& m) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return r;
}

Mat3 from_eigen(const Eigen::Matrix3d& m) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
    return r;
}

Eigen::Matrix3d sym_to_eigen(const std::array<double, 6>& u) {
    Eigen::Matrix3d U;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            U(i, j) = u[static_cast<size_t>(sym_index(i, j))];
    return U;
}

int stable_rank(const Eigen::VectorXd& sv, bool& stable) {
    auto count = [&](double tol) {
        int r = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol * sv(0)) ++r;
        return r;
    };
    int r = count(1e-8);
    stable = (count(1e-7) == r) && (count(1e-9) == r);
    return r;
}

}  // namespace

const std::vector<Generator>& sp6_generators() {
    static const std::vector<Generator> gens = build_generators();
    return gens;
}

double conformality_residual(const Generator& g, const std::array<double, 6>& point,
                             std::uint64_t seed) {
    // Jacobian of the field at the point.
    double J[6][6];
    std::vector<double> pt(point.begin(), point.end());
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n)
            J[m][n] = g.xi[static_cast<size_t>(m)].diff(n).eval(pt);

    // L_X(det dU)(v,v,v) = 3 det3(J v, v, v) for constant-coefficient det3.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<std::array<double, 6>> vs(20);
    double num = 0.0, den = 0.0, ymax = 0.0;
    std::vector<double> ys, cs;
    for (auto& v : vs) {
        for (auto& x : v) x = d(rng);
        std::array<double, 6> Jv{};
        for (int m = 0; m < 6; ++m)
            for (int n = 0; n < 6; ++n)
                Jv[static_cast<size_t>(m)] += J[m][n] * v[static_cast<size_t>(n)];
        double y = 3.0 * det_trilinear(Jv, v, v);
        double c = det_sym6(v);
        ys.push_back(y);
        cs.push_back(c);
        num += y * c;
        den += c * c;
        ymax = std::max(ymax, std::abs(y));
    }
    double phi = den > 0.0 ? num / den : 0.0;
    double worst = 0.0;
    for (size_t i = 0; i < ys.size(); ++i)
        worst = std::max(worst, std::abs(ys[i] - phi * cs[i]));
    return worst / (1.0 + ymax);
}

Generator bracket(const Generator& g, const Generator& h) {
    Generator out;
    for (int m = 0; m < 6; ++m) {
        Expr e = Expr::constant(0.0, u6_names());
        for (int n = 0; n < 6; ++n)
            e = e + g.xi[static_cast<size_t>(n)] * h.xi[static_cast<size_t>(m)].diff(n) -
                h.xi[static_cast<size_t>(n)] * g.xi[static_cast<size_t>(m)].diff(n);
        out.xi[static_cast<size_t>(m)] = e;
    }
    return out;
}

double span_projection_residual(const Generator& g, std::span<const Generator> basis,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const int npts = 40;
    Eigen::MatrixXd M(6 * npts, static_cast<int>(basis.size()));
    Eigen::VectorXd y(6 * npts);
    for (int p = 0; p < npts; ++p) {
        std::vector<double> pt(6);
        for (auto& x : pt) x = d(rng);
        for (int m = 0; m < 6; ++m) {
            y(6 * p + m) = g.xi[static_cast<size_t>(m)].eval(pt);
            for (size_t b = 0; b < basis.size(); ++b)
                M(6 * p + m, static_cast<int>(b)) = basis[b].xi[static_cast<size_t>(m)].eval(pt);
        }
    }
    Eigen::VectorXd c = M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    return (M * c - y).norm() / (1.0 + y.norm());
}

GroupElement GroupElement::identity() {
    GroupElement g;
    for (int i = 0; i < 3; ++i) {
        g.A[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
        g.D[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
    }
    return g;
}

GroupElement translation_element(const Mat3& b_sym) {
    GroupElement g = GroupElement::identity();
    g.B = b_sym;
    return g;
}

GroupElement gl3_element(const Mat3& L) {
    Eigen::Matrix3d M = to_eigen(L);
    if (std::abs(M.determinant()) < 1e-10)
        throw std::invalid_argument("gl3_element: singular matrix");
    GroupElement g;
    g.A = from_eigen(M.transpose());
    g.D = from_eigen(M.inverse());
    return g;
}

GroupElement shear_element(const Mat3& c_sym) {
    GroupElement g = GroupElement::identity();
    g.C = c_sym;
    return g;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    Eigen::Matrix3d A1 = to_eigen(g.A), B1 = to_eigen(g.B), C1 = to_eigen(g.C), D1 = to_eigen(g.D);
    Eigen::Matrix3d A2 = to_eigen(h.A), B2 = to_eigen(h.B), C2 = to_eigen(h.C), D2 = to_eigen(h.D);
    GroupElement r;
    r.A = from_eigen(A1 * A2 + B1 * C2);
    r.B = from_eigen(A1 * B2 + B1 * D2);
    r.C = from_eigen(C1 * A2 + D1 * C2);
    r.D = from_eigen(C1 * B2 + D1 * D2);
    return r;
}

GroupElement inverse(const GroupElement& g) {
    GroupElement r;
    r.A = from_eigen(to_eigen(g.D).transpose());
    r.B = from_eigen(-to_eigen(g.B).transpose());
    r.C = from_eigen(-to_eigen(g.C).transpose());
    r.D = from_eigen(to_eigen(g.A).transpose());
    return r;
}

double group_residual(const GroupElement& g) {
    Eigen::Matrix3d A = to_eigen(g.A), B = to_eigen(g.B), C = to_eigen(g.C), D = to_eigen(g.D);
    double r = (A.transpose() * C - C.transpose() * A).norm();
    r = std::max(r, (B.transpose() * D - D.transpose() * B).norm());
    r = std::max(r, (A.transpose() * D - C.transpose() * B - Eigen::Matrix3d::Identity()).norm());
    return r;
}

GroupElement random_group_element(std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-scale, scale);
    Mat3 b{}, c{}, L{};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            b[static_cast<size_t>(i)][static_cast<size_t>(j)] = b[static_cast<size_t>(j)][static_cast<size_t>(i)] = d(rng);
            c[static_cast<size_t>(i)][static_cast<size_t>(j)] = c[static_cast<size_t>(j)][static_cast<size_t>(i)] = d(rng);
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            L[static_cast<size_t>(i)][static_cast<size_t>(j)] = (i == j ? 1.0 : 0.0) + d(rng);
    return compose(translation_element(b), compose(gl3_element(L), shear_element(c)));
}

std::array<double, 6> apply_group_point(const GroupElement& g, const std::array<double, 6>& u) {
    Eigen::Matrix3d U = sym_to_eigen(u);
    Eigen::Matrix3d M = to_eigen(g.C) * U + to_eigen(g.D);
    if (std::abs(M.determinant()) < 1e-12)
        throw NumericError("apply_group_point: singular C U + D");
    Eigen::Matrix3d R = (to_eigen(g.A) * U + to_eigen(g.B)) * M.inverse();
    R = 0.5 * (R + R.transpose().eval());
    std::array<double, 6> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            out[static_cast<size_t>(sym_index(i, j))] = R(i, j);
    return out;
}

Expr apply_sp6(const Expr& F, const GroupElement& g) {
    if (F.nvars() != 6)
        throw std::invalid_argument("apply_sp6: F must be an expression in 6 variables");
    if (group_residual(g) > 1e-10)
        throw std::invalid_argument("apply_sp6: not a symplectic group element");
    GroupElement gi = inverse(g);
    const auto& vars = F.vars();
    std::array<std::array<Expr, 3>, 3> Ut;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Ut[static_cast<size_t>(i)][static_cast<size_t>(j)] = Expr::var(sym_index(i, j), vars);
    auto cst = [&](double v) { return Expr::constant(v, vars); };

    // E = A' U~ + B', M = C' U~ + D' with primes the blocks of g^{-1}.
    std::array<std::array<Expr, 3>, 3> E, M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Expr e = cst(gi.B[static_cast<size_t>(i)][static_cast<size_t>(j)]);
            Expr m = cst(gi.D[static_cast<size_t>(i)][static_cast<size_t>(j)]);
            for (int k = 0; k < 3; ++k) {
                e = e + cst(gi.A[static_cast<size_t>(i)][static_cast<size_t>(k)]) * Ut[static_cast<size_t>(k)][static_cast<size_t>(j)];
                m = m + cst(gi.C[static_cast<size_t>(i)][static_cast<size_t>(k)]) * Ut[static_cast<size_t>(k)][static_cast<size_t>(j)];
            }
            E[static_cast<size_t>(i)][static_cast<size_t>(j)] = e;
            M[static_cast<size_t>(i)][static_cast<size_t>(j)] = m;
        }

    auto minor2 = [&](int r0, int r1, int c0, int c1) {
        return M[static_cast<size_t>(r0)][static_cast<size_t>(c0)] * M[static_cast<size_t>(r1)][static_cast<size_t>(c1)] -
               M[static_cast<size_t>(r0)][static_cast<size_t>(c1)] * M[static_cast<size_t>(r1)][static_cast<size_t>(c0)];
    };
    Expr det = M[0][0] * minor2(1, 2, 1, 2) - M[0][1] * minor2(1, 2, 0, 2) +
               M[0][2] * minor2(1, 2, 0, 1);
    // Adjugate: adj(M)_{ij} = cofactor_{ji}.
    std::array<std::array<Expr, 3>, 3> adj;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (j == 0) ? 1 : 0, r1 = (j == 2) ? 1 : 2;
            int c0 = (i == 0) ? 1 : 0, c1 = (i == 2) ? 1 : 2;
            Expr cof = minor2(r0, r1, c0, c1);
            if ((i + j) % 2 == 1) cof = -cof;
            adj[static_cast<size_t>(i)][static_cast<size_t>(j)] = cof;
        }

    // P = E adj(M) / det(M), symmetrized.
    std::vector<Expr> repl(6, cst(0.0));
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Expr pij = cst(0.0), pji = cst(0.0);
            for (int k = 0; k < 3; ++k) {
                pij = pij + E[static_cast<size_t>(i)][static_cast<size_t>(k)] * adj[static_cast<size_t>(k)][static_cast<size_t>(j)];
                pji = pji + E[static_cast<size_t>(j)][static_cast<size_t>(k)] * adj[static_cast<size_t>(k)][static_cast<size_t>(i)];
            }
            repl[static_cast<size_t>(sym_index(i, j))] = (pij + pji) / (cst(2.0) * det);
        }
    return F.substitute(std::span<const Expr>(repl.data(), 6));
}

SymmetryResult symmetry_dimension(const Expr& F, int n_samples, std::uint64_t seed,
                                  const Box6& box) {
    if (F.nvars() != 6)
        throw std::invalid_argument("symmetry_dimension: F must be an expression in 6 variables");
    int n = std::max(n_samples, 60);
    auto pts = sample_hypersurface(F, box, n, seed);
    std::vector<Expr> grad;
    for (int m = 0; m < 6; ++m) grad.push_back(F.diff(m));
    const auto& gens = sp6_generators();

    Eigen::MatrixXd M(n, 21);
    for (int p = 0; p < n; ++p) {
        std::vector<double> pt(pts[static_cast<size_t>(p)].begin(), pts[static_cast<size_t>(p)].end());
        std::array<double, 6> gv{};
        for (int m = 0; m < 6; ++m) gv[static_cast<size_t>(m)] = grad[static_cast<size_t>(m)].eval(pt);
        for (int b = 0; b < 21; ++b) {
            double s = 0.0;
            for (int m = 0; m < 6; ++m)
                s += gens[static_cast<size_t>(b)].xi[static_cast<size_t>(m)].eval(pt) * gv[static_cast<size_t>(m)];
            M(p, b) = s;
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    SymmetryResult r;
    r.rank = stable_rank(svd.singularValues(), r.threshold_stable);
    r.dimension = 21 - r.rank;
    return r;
}

JetPoint21 jet_point_from_density(const Expr& f, const std::array<double, 5>& base_abcpq) {
    return jet_point_from_jet(f.eval_jet(std::span<const double>(base_abcpq.data(), 5), 2),
                              base_abcpq);
}

JetPoint21 jet_point_from_jet(const Jet& j, const std::array<double, 5>& base_abcpq) {
    if (j.nvars() != 5 || j.order() < 2)
        throw std::invalid_argument("jet_point_from_jet: need a 5-variable jet of order >= 2");
    JetPoint21 jp;
    jp.u = j.value();
    for (int i = 0; i < 5; ++i) {
        jp.x[static_cast<size_t>(i)] = base_abcpq[static_cast<size_t>(kToAbcpq[i])];
        MultiIndex mi{};
        mi[kToAbcpq[i]]++;
        jp.ui[static_cast<size_t>(i)] = j.derivative(mi);
        for (int k = i; k < 5; ++k) {
            MultiIndex mik = mi;
            mik[kToAbcpq[k]]++;
            jp.uij[static_cast<size_t>(pair_index(i, k))] = j.derivative(mik);
        }
    }
    return jp;
}

namespace {

// Value, gradient, Hessian of an expression at a point, read off a 2-jet.
struct D2 {
    double v = 0.0;
    std::array<double, 6> d{};
    std::array<std::array<double, 6>, 6> dd{};
};

D2 d2_of(const Expr& e, const std::array<double, 6>& pt) {
    Jet j = e.eval_jet(std::span<const double>(pt.data(), 6), 2);
    D2 r;
    r.v = j.value();
    for (int m = 0; m < 6; ++m) {
        MultiIndex mi{};
        mi[m]++;
        r.d[static_cast<size_t>(m)] = j.derivative(mi);
        for (int n = m; n < 6; ++n) {
            MultiIndex mn = mi;
            mn[n]++;
            r.dd[static_cast<size_t>(m)][static_cast<size_t>(n)] =
                r.dd[static_cast<size_t>(n)][static_cast<size_t>(m)] = j.derivative(mn);
        }
    }
    return r;
}

}  // namespace

OrbitRankResult prolong_orbit_rank(const JetPoint21& jp, std::uint64_t seed) {
    // Recover the third derivatives from the compatibility system on the
    // induced snapshot.
    Snapshot s;
    for (int i = 0; i < 5; ++i) {
        s.first[static_cast<size_t>(kToAbcpq[i])] = jp.ui[static_cast<size_t>(i)];
        for (int k = i; k < 5; ++k)
            s.second[static_cast<size_t>(pair_index(kToAbcpq[i], kToAbcpq[k]))] =
                jp.uij[static_cast<size_t>(pair_index(i, k))];
    }
    ThirdSolve ts = solve_thirds(s, 40, seed);
    if (ts.system_rank < 35)
        throw NumericError("prolong_orbit_rank: compatibility system is rank-deficient");
    auto uijk = [&](int i, int j, int k) {
        return ts.thirds[static_cast<size_t>(
            triple_index(kToAbcpq[i], kToAbcpq[j], kToAbcpq[k]))];
    };
    auto uij = [&](int i, int j) { return jp.uij[static_cast<size_t>(pair_index(i, j))]; };

    std::array<double, 6> pt;
    for (int i = 0; i < 5; ++i) pt[static_cast<size_t>(i)] = jp.x[static_cast<size_t>(i)];
    pt[5] = jp.u;

    const auto& gens = sp6_generators();
    Eigen::MatrixXd M(21, 21);
    for (int b = 0; b < 21; ++b) {
        const Generator& g = gens[static_cast<size_t>(b)];
        std::array<D2, 5> xi;
        for (int k = 0; k < 5; ++k) xi[static_cast<size_t>(k)] = d2_of(g.xi[static_cast<size_t>(k)], pt);
        D2 eta = d2_of(g.xi[5], pt);
        const auto& ui = jp.ui;

        // Total derivative along x^i of a function of (x, u).
        auto Dtot = [&](const D2& f, int i) { return f.d[static_cast<size_t>(i)] + ui[static_cast<size_t>(i)] * f.d[5]; };

        std::array<double, 5> zeta;
        for (int i = 0; i < 5; ++i) {
            double z = Dtot(eta, i);
            for (int k = 0; k < 5; ++k) z -= ui[static_cast<size_t>(k)] * Dtot(xi[static_cast<size_t>(k)], i);
            zeta[static_cast<size_t>(i)] = z;
        }

        double zij[5][5];
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                // partials of zeta_i as a function on (x, u, u_m)
                double dxj = eta.dd[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                             ui[static_cast<size_t>(i)] * eta.dd[5][static_cast<size_t>(j)];
                double du = eta.dd[static_cast<size_t>(i)][5] + ui[static_cast<size_t>(i)] * eta.dd[5][5];
                for (int k = 0; k < 5; ++k) {
                    dxj -= ui[static_cast<size_t>(k)] *
                           (xi[static_cast<size_t>(k)].dd[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                            ui[static_cast<size_t>(i)] * xi[static_cast<size_t>(k)].dd[5][static_cast<size_t>(j)]);
                    du -= ui[static_cast<size_t>(k)] *
                          (xi[static_cast<size_t>(k)].dd[static_cast<size_t>(i)][5] +
                           ui[static_cast<size_t>(i)] * xi[static_cast<size_t>(k)].dd[5][5]);
                }
                double dz = dxj + ui[static_cast<size_t>(j)] * du;
                double etau = eta.d[5];
                for (int k = 0; k < 5; ++k) etau -= ui[static_cast<size_t>(k)] * xi[static_cast<size_t>(k)].d[5];
                for (int m = 0; m < 5; ++m) {
                    double dum = (m == i ? etau : 0.0) -
                                 (xi[static_cast<size_t>(m)].d[static_cast<size_t>(i)] +
                                  ui[static_cast<size_t>(i)] * xi[static_cast<size_t>(m)].d[5]);
                    dz += uij(j, m) * dum;
                }
                for (int k = 0; k < 5; ++k) dz -= uij(i, k) * Dtot(xi[static_cast<size_t>(k)], j);
                zij[i][j] = dz;
            }

        // Prolonged field minus transport by xi^i D_i, in the 21 fiber
        // directions (u; u_j; u_jk).
        double vu = eta.v;
        for (int i = 0; i < 5; ++i) vu -= xi[static_cast<size_t>(i)].v * ui[static_cast<size_t>(i)];
        M(b, 0) = vu;
        for (int j = 0; j < 5; ++j) {
            double v = zeta[static_cast<size_t>(j)];
            for (int i = 0; i < 5; ++i) v -= xi[static_cast<size_t>(i)].v * uij(i, j);
            M(b, 1 + j) = v;
        }
        for (int j = 0; j < 5; ++j)
            for (int k = j; k < 5; ++k) {
                double v = 0.5 * (zij[j][k] + zij[k][j]);
                for (int i = 0; i < 5; ++i) v -= xi[static_cast<size_t>(i)].v * uijk(i, j, k);
                M(b, 6 + pair_index(j, k)) = v;
            }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    OrbitRankResult r;
    r.rank = stable_rank(svd.singularValues(), r.threshold_stable);
    return r;
}

}  // namespace hirota
