#include "hirota/reductions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace hirota {

namespace {

Snapshot snap2(const Expr& f, const std::array<double, 5>& fields) {
    return Snapshot::from_jet(f.eval_jet(std::span<const double>(fields.data(), 5), 2));
}

// Root of lambda^2 - (f_p + f_q mu) lambda - (f_a + f_b mu + f_c mu^2) = 0.
double conic_root(const Snapshot& s, double mu, double branch, bool nearest, double prev) {
    double B = s.f1(kVarP) + s.f1(kVarQ) * mu;
    double C = s.f1(kVarA) + s.f1(kVarB) * mu + s.f1(kVarC) * mu * mu;
    double disc = B * B + 4.0 * C;
    if (disc < 0.0) throw NumericError("conic_root: no real dispersion root");
    double r = std::sqrt(disc);
    double lo = (B - r) / 2.0, hi = (B + r) / 2.0;
    if (nearest) return std::abs(lo - prev) < std::abs(hi - prev) ? lo : hi;
    return branch >= 0.0 ? hi : lo;
}

// Full state of the pairwise-flow system at one grid node.
struct State {
    std::array<double, 5> fields{};
    double fslot = 0.0;
    std::array<double, 3> mu{}, lam{}, da{};
};

// Rates along R^d.  The sheet-d quantities mu[d], lam[d], da[d] are not
// evolved along their own direction (Goursat data / gauge).
struct Rates {
    std::array<double, 5> fields{};
    double fslot = 0.0;
    std::array<double, 3> mu{}, lam{}, da{};
};

Rates flow(const Expr& f, const State& x, int d, int n, double delta_floor, double* min_dij) {
    Snapshot s = snap2(f, x.fields);
    if (std::abs(delta(s)) < delta_floor)
        throw NumericError("flow: dispersion conic degenerates along the grid");
    Rates r;
    double ad = x.da[static_cast<size_t>(d)];
    double mud = x.mu[static_cast<size_t>(d)], lamd = x.lam[static_cast<size_t>(d)];
    r.fields = {ad, mud * ad, mud * mud * ad, lamd * ad, lamd * mud * ad};
    r.fslot = lamd * lamd * ad;
    // lam^d must ride the conic as the coefficients evolve (mu^d is the free
    // Goursat data and is taken constant along its own direction)
    {
        double V[5] = {1.0, mud, mud * mud, lamd, lamd * mud};
        double nvv = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) nvv += s.f2(i, j) * V[i] * V[j];
        double den = 2.0 * lamd - s.f1(kVarP) - s.f1(kVarQ) * mud;
        if (std::abs(den) < 1e-10)
            throw NumericError("flow: conic branch crossing");
        r.lam[static_cast<size_t>(d)] = ad * nvv / den;
    }
    for (int i = 0; i < n; ++i) {
        if (i == d) continue;
        PairData pd = pair_data(s, {x.lam[static_cast<size_t>(i)], x.mu[static_cast<size_t>(i)]},
                                {lamd, mud});
        if (min_dij) *min_dij = std::min(*min_dij, std::abs(pd.D));
        r.mu[static_cast<size_t>(i)] = (x.mu[static_cast<size_t>(i)] - mud) * pd.B * ad;
        r.lam[static_cast<size_t>(i)] = (x.lam[static_cast<size_t>(i)] - lamd) * pd.B * ad;
        r.da[static_cast<size_t>(i)] = -2.0 * pd.B * x.da[static_cast<size_t>(i)] * ad;
    }
    return r;
}

State node_state(const GTNode& nd) {
    State s;
    s.fields = nd.fields;
    s.fslot = nd.fslot;
    s.mu = nd.mu;
    s.lam = nd.lam;
    s.da = nd.da;
    return s;
}

[[noreturn]] void node_error(const char* what, int i, int j, int k) {
    std::ostringstream os;
    os << what << " at node (" << i << ", " << j << ", " << k << ")";
    throw NumericError(os.str());
}

}  // namespace

GTNode& GTGrid::at(int i, int j, int k) {
    int m = steps + 1;
    int idx = (n == 3) ? (i * m + j) * m + k : i * m + j;
    return nodes[static_cast<size_t>(idx)];
}

const GTNode& GTGrid::at(int i, int j, int k) const {
    return const_cast<GTGrid*>(this)->at(i, j, k);
}

double GTGrid::max_dispersion_residual() const {
    double worst = 0.0;
    for (const auto& nd : nodes)
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, nd.disp_residual[static_cast<size_t>(i)]);
    return worst;
}

GTGrid gt_integrate(const Expr& f, int n, const GTBoundary& bd, int steps, double h,
                    double delta_floor) {
    if (n != 2 && n != 3) throw std::invalid_argument("gt_integrate: n must be 2 or 3");
    if (f.nvars() != 5) throw std::invalid_argument("gt_integrate: f must have 5 variables");
    GTGrid g;
    g.n = n;
    g.steps = steps;
    g.h = h;
    int m = steps + 1;
    g.nodes.resize(static_cast<size_t>(n == 3 ? m * m * m : m * m));

    auto mu_axis = [&](int i, double r) { return bd.mu_axis[static_cast<size_t>(i)](r); };
    auto da_axis = [&](int i, double r) {
        return bd.da_axis[static_cast<size_t>(i)] ? bd.da_axis[static_cast<size_t>(i)](r) : 1.0;
    };

    // origin
    {
        GTNode& o = g.at(0, 0, 0);
        o.fields = bd.base;
        o.fslot = f.eval(std::vector<double>(bd.base.begin(), bd.base.end()));
        Snapshot s = snap2(f, o.fields);
        if (std::abs(delta(s)) < delta_floor)
            throw NumericError("gt_integrate: degenerate conic at the base point");
        for (int i = 0; i < n; ++i) {
            o.mu[static_cast<size_t>(i)] = mu_axis(i, 0.0);
            o.da[static_cast<size_t>(i)] = da_axis(i, 0.0);
            o.lam[static_cast<size_t>(i)] = conic_root(s, o.mu[static_cast<size_t>(i)],
                                                       bd.lambda_branch[static_cast<size_t>(i)],
                                                       false, 0.0);
            o.disp_residual[static_cast<size_t>(i)] =
                conic_residual(s, {o.lam[static_cast<size_t>(i)], o.mu[static_cast<size_t>(i)]});
        }
        o.min_dij = std::numeric_limits<double>::infinity();
    }

    double reject = 100.0 * h * h;
    int kmax = (n == 3) ? steps : 0;
    for (int i1 = 0; i1 <= steps; ++i1)
        for (int i2 = 0; i2 <= steps; ++i2)
            for (int i3 = 0; i3 <= kmax; ++i3) {
                if (i1 == 0 && i2 == 0 && i3 == 0) continue;
                int idx[3] = {i1, i2, i3};
                GTNode& nd = g.at(i1, i2, i3);
                double min_dij = std::numeric_limits<double>::infinity();

                // backward neighbors per direction
                const GTNode* nb[3] = {nullptr, nullptr, nullptr};
                if (i1 > 0) nb[0] = &g.at(i1 - 1, i2, i3);
                if (i2 > 0) nb[1] = &g.at(i1, i2 - 1, i3);
                if (i3 > 0) nb[2] = &g.at(i1, i2, i3 - 1);

                // predictor: copy the first available neighbor
                State cur;
                for (int d = 0; d < n; ++d)
                    if (nb[d]) {
                        cur = node_state(*nb[d]);
                        break;
                    }

                try {
                    for (int sweep = 0; sweep < 3; ++sweep) {
                        State next = cur;
                        // fields and fslot: trapezoid along every available direction
                        double wsum = 0.0;
                        std::array<double, 5> facc{};
                        double fsacc = 0.0;
                        for (int d = 0; d < n; ++d) {
                            if (!nb[d]) continue;
                            State prev = node_state(*nb[d]);
                            Rates rp = flow(f, prev, d, n, delta_floor, nullptr);
                            Rates rc = flow(f, cur, d, n, delta_floor, &min_dij);
                            for (int m5 = 0; m5 < 5; ++m5)
                                facc[static_cast<size_t>(m5)] +=
                                    prev.fields[static_cast<size_t>(m5)] +
                                    h / 2.0 * (rp.fields[static_cast<size_t>(m5)] +
                                               rc.fields[static_cast<size_t>(m5)]);
                            fsacc += prev.fslot + h / 2.0 * (rp.fslot + rc.fslot);
                            wsum += 1.0;
                            // sheet quantities evolving along d
                            for (int i = 0; i < n; ++i) {
                                if (i == d) continue;
                                // count how many directions update sheet i
                                int cnt = 0;
                                for (int d2 = 0; d2 < n; ++d2)
                                    if (d2 != i && nb[d2]) ++cnt;
                                double w = 1.0 / cnt;
                                next.mu[static_cast<size_t>(i)] +=
                                    w * (prev.mu[static_cast<size_t>(i)] +
                                         h / 2.0 * (rp.mu[static_cast<size_t>(i)] +
                                                    rc.mu[static_cast<size_t>(i)]) -
                                         cur.mu[static_cast<size_t>(i)]);
                                next.lam[static_cast<size_t>(i)] +=
                                    w * (prev.lam[static_cast<size_t>(i)] +
                                         h / 2.0 * (rp.lam[static_cast<size_t>(i)] +
                                                    rc.lam[static_cast<size_t>(i)]) -
                                         cur.lam[static_cast<size_t>(i)]);
                                next.da[static_cast<size_t>(i)] +=
                                    w * (prev.da[static_cast<size_t>(i)] +
                                         h / 2.0 * (rp.da[static_cast<size_t>(i)] +
                                                    rc.da[static_cast<size_t>(i)]) -
                                         cur.da[static_cast<size_t>(i)]);
                            }
                        }
                        for (int m5 = 0; m5 < 5; ++m5)
                            next.fields[static_cast<size_t>(m5)] = facc[static_cast<size_t>(m5)] / wsum;
                        next.fslot = fsacc / wsum;

                        // sheets with no admissible direction sit on their own
                        // axis: take the Goursat data there
                        for (int i = 0; i < n; ++i) {
                            bool has_dir = false;
                            for (int d = 0; d < n; ++d)
                                if (d != i && nb[d]) has_dir = true;
                            if (!has_dir) {
                                double r = idx[i] * h;
                                next.mu[static_cast<size_t>(i)] = mu_axis(i, r);
                                next.da[static_cast<size_t>(i)] = da_axis(i, r);
                                Snapshot s = snap2(f, next.fields);
                                next.lam[static_cast<size_t>(i)] =
                                    conic_root(s, next.mu[static_cast<size_t>(i)], 0.0, true,
                                               cur.lam[static_cast<size_t>(i)]);
                            }
                        }
                        cur = next;
                    }
                } catch (const NumericError&) {
                    node_error("gt_integrate: degeneracy", i1, i2, i3);
                }

                // diagnostics, drift check, periodic projection
                Snapshot s = snap2(f, cur.fields);
                for (int i = 0; i < n; ++i) {
                    nd.disp_residual[static_cast<size_t>(i)] = conic_residual(
                        s, {cur.lam[static_cast<size_t>(i)], cur.mu[static_cast<size_t>(i)]});
                    if (nd.disp_residual[static_cast<size_t>(i)] > reject)
                        node_error("gt_integrate: dispersion drift", i1, i2, i3);
                }
                if ((i1 + i2 + i3) % 10 == 0)
                    for (int i = 0; i < n; ++i)
                        cur.lam[static_cast<size_t>(i)] =
                            conic_root(s, cur.mu[static_cast<size_t>(i)], 0.0, true,
                                       cur.lam[static_cast<size_t>(i)]);

                nd.fields = cur.fields;
                nd.fslot = cur.fslot;
                nd.mu = cur.mu;
                nd.lam = cur.lam;
                nd.da = cur.da;
                nd.min_dij = min_dij;
            }
    return g;
}

BisecantReport bisecant_check(const GTGrid& g, const Expr& f) {
    BisecantReport rep;
    int kmax = (g.n == 3) ? g.steps - 1 : 0;
    int kmin = (g.n == 3) ? 1 : 0;
    auto Umat = [&](const GTNode& nd) {
        Eigen::Matrix3d U;
        U << nd.fields[0], nd.fields[1], nd.fields[3],
             nd.fields[1], nd.fields[2], nd.fields[4],
             nd.fields[3], nd.fields[4], nd.fslot;
        return U;
    };
    for (int i1 = 1; i1 < g.steps; ++i1)
        for (int i2 = 1; i2 < g.steps; ++i2)
            for (int i3 = kmin; i3 <= kmax; ++i3) {
                const GTNode& nd = g.at(i1, i2, i3);
                std::vector<double> flds(nd.fields.begin(), nd.fields.end());
                rep.max_f_residual =
                    std::max(rep.max_f_residual, std::abs(nd.fslot - f.eval(flds)));
                for (int d = 0; d < g.n; ++d) {
                    int di = d == 0, dj = d == 1, dk = d == 2;
                    Eigen::Matrix3d dU = (Umat(g.at(i1 + di, i2 + dj, i3 + dk)) -
                                          Umat(g.at(i1 - di, i2 - dj, i3 - dk))) /
                                         (2.0 * g.h);
                    Eigen::JacobiSVD<Eigen::Matrix3d> svd(dU);
                    double s1 = svd.singularValues()(0), s2 = svd.singularValues()(1);
                    if (s1 > 1e-12) rep.max_rank_measure = std::max(rep.max_rank_measure, s2 / s1);
                    Eigen::Vector3d v(1.0, nd.mu[static_cast<size_t>(d)],
                                      nd.lam[static_cast<size_t>(d)]);
                    Eigen::Matrix3d model = v * v.transpose() * nd.da[static_cast<size_t>(d)];
                    rep.max_model_mismatch =
                        std::max(rep.max_model_mismatch,
                                 (dU - model).norm() / std::max(1.0, dU.norm()));
                }
            }
    return rep;
}

Consistency3 gt_consistency3(const Expr& f, const std::array<double, 5>& base,
                             const std::array<ConicPoint, 3>& pts, double h) {
    // full-state rate of the frozen flow along direction d (own-sheet mu and da
    // are Goursat data, so their rates vanish; lam[d] rides the dispersion conic)
    auto rate_of = [&](const State& x, int d) {
        return flow(f, x, d, 3, 1e-10, nullptr);
    };
    auto advance = [](State x, const Rates& r, double t) {
        for (int m = 0; m < 5; ++m)
            x.fields[static_cast<size_t>(m)] += t * r.fields[static_cast<size_t>(m)];
        x.fslot += t * r.fslot;
        for (int i = 0; i < 3; ++i) {
            x.mu[static_cast<size_t>(i)] += t * r.mu[static_cast<size_t>(i)];
            x.lam[static_cast<size_t>(i)] += t * r.lam[static_cast<size_t>(i)];
            x.da[static_cast<size_t>(i)] += t * r.da[static_cast<size_t>(i)];
        }
        return x;
    };

    State seed;
    seed.fields = base;
    seed.fslot = f.eval(std::vector<double>(base.begin(), base.end()));
    for (int i = 0; i < 3; ++i) {
        seed.mu[static_cast<size_t>(i)] = pts[static_cast<size_t>(i)].mu;
        seed.lam[static_cast<size_t>(i)] = pts[static_cast<size_t>(i)].lambda;
        seed.da[static_cast<size_t>(i)] = 1.0;
    }

    // mu^1 component of the Lie bracket [G_2, G_3] of the two sheet flows,
    // estimated with central differences of step hh; the truncation error is
    // O(hh^2), so halving hh quarters the defect when the bracket vanishes
    Consistency3 out;
    double hh = h;
    Rates g2 = rate_of(seed, 1);
    Rates g3 = rate_of(seed, 2);
    for (int level = 0; level < 3; ++level) {
        Rates d3g2 = rate_of(advance(seed, g3, hh), 1);
        Rates d3g2m = rate_of(advance(seed, g3, -hh), 1);
        Rates d2g3 = rate_of(advance(seed, g2, hh), 2);
        Rates d2g3m = rate_of(advance(seed, g2, -hh), 2);
        double bracket = (d2g3.mu[0] - d2g3m.mu[0]) / (2.0 * hh)
                       - (d3g2.mu[0] - d3g2m.mu[0]) / (2.0 * hh);
        out.defect[static_cast<size_t>(level)] = std::abs(bracket);
        hh /= 2.0;
    }

    // closed-form commutator of the two flows acting on mu^1
    Snapshot s3 = Snapshot::from_jet(f.eval_jet(std::span<const double>(base.data(), 5), 3));
    double e_k = gt_residual(s3, pts[0], pts[1], pts[2]).value;  // d_3 deviation of B_12
    double e_j = gt_residual(s3, pts[0], pts[2], pts[1]).value;  // d_2 deviation of B_13
    out.predicted = std::abs((pts[0].mu - pts[1].mu) * e_k - (pts[0].mu - pts[2].mu) * e_j);
    return out;
}

namespace {

// cubic Hermite on a uniform knot grid
struct HermiteTable {
    double r0 = 0.0, hr = 0.0;
    std::vector<std::array<double, 6>> y, dy;  // (b, c, p, q, fslot, lam)

    double eval(int comp, double r, double* deriv = nullptr) const {
        double s = (r - r0) / hr;
        int cell = std::clamp(static_cast<int>(std::floor(s)), 0,
                              static_cast<int>(y.size()) - 2);
        double t = s - cell;
        double y0 = y[static_cast<size_t>(cell)][static_cast<size_t>(comp)];
        double y1 = y[static_cast<size_t>(cell) + 1][static_cast<size_t>(comp)];
        double d0 = dy[static_cast<size_t>(cell)][static_cast<size_t>(comp)] * hr;
        double d1 = dy[static_cast<size_t>(cell) + 1][static_cast<size_t>(comp)] * hr;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        if (deriv) {
            double g00 = 6 * t * (t - 1), g10 = (1 - t) * (1 - 3 * t);
            double g01 = 6 * t * (1 - t), g11 = t * (3 * t - 2);
            *deriv = (g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1) / hr;
        }
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
    }
};

}  // namespace

SimpleWaveReport simple_wave(const Expr& f, const Expr& mu_R, const Expr& a_R,
                             const Expr& psi_R, const std::array<double, 5>& base,
                             double r_lo, double r_hi, const Window& win, int grid_n,
                             double lambda_branch) {
    if (f.nvars() != 5) throw std::invalid_argument("simple_wave: f must have 5 variables");
    Expr mup_R = mu_R.diff(0), ap_R = a_R.diff(0), psip_R = psi_R.diff(0);
    auto e1 = [](const Expr& e, double r) { return e.eval(std::span<const double>(&r, 1)); };
    if (std::abs(e1(a_R, r_lo) - base[0]) > 1e-12)
        throw std::invalid_argument("simple_wave: a(r_lo) must match the base point");

    // profile ODE right-hand side; state = (b, c, p, q, fslot, lam)
    auto rhs = [&](double r, const std::array<double, 6>& y) {
        double a = e1(a_R, r), ap = e1(ap_R, r);
        double mu = e1(mu_R, r), mup = e1(mup_R, r);
        double lam = y[5];
        std::array<double, 5> flds = {a, y[0], y[1], y[2], y[3]};
        Snapshot s = snap2(f, flds);
        double V[5] = {1.0, mu, mu * mu, lam, lam * mu};
        double nvv = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) nvv += s.f2(i, j) * V[i] * V[j];
        double den = 2.0 * lam - s.f1(kVarP) - s.f1(kVarQ) * mu;
        if (std::abs(den) < 1e-10)
            throw NumericError("simple_wave: conic branch crossing along the profile");
        double lamp =
            (ap * nvv + mup * (s.f1(kVarB) + 2.0 * s.f1(kVarC) * mu + s.f1(kVarQ) * lam)) / den;
        return std::array<double, 6>{mu * ap, mu * mu * ap, lam * ap, lam * mu * ap,
                                     lam * lam * ap, lamp};
    };

    const int nr = 4001;
    HermiteTable tab;
    tab.r0 = r_lo;
    tab.hr = (r_hi - r_lo) / (nr - 1);
    tab.y.resize(nr);
    tab.dy.resize(nr);

    std::array<double, 6> y = {base[1], base[2], base[3], base[4], 0.0, 0.0};
    {
        Snapshot s = snap2(f, base);
        y[5] = conic_root(s, e1(mu_R, r_lo), lambda_branch, false, 0.0);
        y[4] = f.eval(std::vector<double>(base.begin(), base.end()));
    }
    SimpleWaveReport rep;
    for (int k = 0; k < nr; ++k) {
        double r = r_lo + k * tab.hr;
        tab.y[static_cast<size_t>(k)] = y;
        auto dydr = rhs(r, y);
        tab.dy[static_cast<size_t>(k)] = dydr;

        // profile diagnostics: the chain-rule derivative of f along R must
        // equal lam^2 a', which is the dispersion relation itself
        double a = e1(a_R, r), ap = e1(ap_R, r), mu = e1(mu_R, r), lam = y[5];
        std::array<double, 5> flds = {a, y[0], y[1], y[2], y[3]};
        Snapshot s = snap2(f, flds);
        double dfdr = ap * (s.f1(kVarA) + s.f1(kVarB) * mu + s.f1(kVarC) * mu * mu +
                            s.f1(kVarP) * lam + s.f1(kVarQ) * lam * mu);
        rep.max_profile_identity =
            std::max(rep.max_profile_identity, std::abs(dfdr - lam * lam * ap));
        rep.max_conic_residual =
            std::max(rep.max_conic_residual, conic_residual(s, {lam, mu}));
        if (k + 1 == nr) break;

        // classical RK4
        double hh = tab.hr;
        auto k1 = dydr;
        auto add = [&](const std::array<double, 6>& v, double w) {
            std::array<double, 6> o = y;
            for (int m = 0; m < 6; ++m) o[static_cast<size_t>(m)] += w * v[static_cast<size_t>(m)];
            return o;
        };
        auto k2 = rhs(r + hh / 2, add(k1, hh / 2));
        auto k3 = rhs(r + hh / 2, add(k2, hh / 2));
        auto k4 = rhs(r + hh, add(k3, hh));
        for (int m = 0; m < 6; ++m)
            y[static_cast<size_t>(m)] +=
                hh / 6.0 * (k1[static_cast<size_t>(m)] + 2 * k2[static_cast<size_t>(m)] +
                            2 * k3[static_cast<size_t>(m)] + k4[static_cast<size_t>(m)]);
    }

    // solve x + mu(R) y + lam(R) t = psi(R) over the space-time grid
    auto solve_r = [&](double x, double yy, double t, double guess) {
        double r = guess;
        for (int it = 0; it < 60; ++it) {
            double lamd = 0.0;
            double lam = tab.eval(5, r, &lamd);
            double gval = x + e1(mu_R, r) * yy + lam * t - e1(psi_R, r);
            double gp = e1(mup_R, r) * yy + lamd * t - e1(psip_R, r);
            if (std::abs(gp) < 1e-14)
                throw NumericError("simple_wave: stalled phase solve (window too large)");
            double rn = r - gval / gp;
            rn = std::clamp(rn, r_lo, r_hi);
            if (std::abs(rn - r) < 1e-14 * (1.0 + std::abs(r))) {
                r = rn;
                break;
            }
            r = rn;
        }
        double lam = tab.eval(5, r);
        double gval = x + e1(mu_R, r) * yy + lam * t - e1(psi_R, r);
        rep.max_newton_residual = std::max(rep.max_newton_residual, std::abs(gval));
        return r;
    };

    int gn = grid_n;
    auto coord = [&](int axis, int i) {
        return win.lo[static_cast<size_t>(axis)] +
               (win.hi[static_cast<size_t>(axis)] - win.lo[static_cast<size_t>(axis)]) * i /
                   (gn - 1);
    };
    // field grids: a, b, c, p, q, fval
    std::vector<std::array<double, 6>> grid(static_cast<size_t>(gn) * gn * gn);
    auto gidx = [&](int i, int j, int k) {
        return static_cast<size_t>((i * gn + j) * gn + k);
    };
    double guess = (r_lo + r_hi) / 2.0;
    for (int i = 0; i < gn; ++i)
        for (int j = 0; j < gn; ++j)
            for (int k = 0; k < gn; ++k) {
                double r = solve_r(coord(0, i), coord(1, j), coord(2, k), guess);
                if (k == 0 && j == 0) guess = r;
                std::array<double, 5> flds = {e1(a_R, r), tab.eval(0, r), tab.eval(1, r),
                                              tab.eval(2, r), tab.eval(3, r)};
                double fv = f.eval(std::vector<double>(flds.begin(), flds.end()));
                grid[gidx(i, j, k)] = {flds[0], flds[1], flds[2], flds[3], flds[4], fv};
            }

    // the eight quasilinear equations by central differences
    double hx = (win.hi[0] - win.lo[0]) / (gn - 1);
    double hy = (win.hi[1] - win.lo[1]) / (gn - 1);
    double ht = (win.hi[2] - win.lo[2]) / (gn - 1);
    auto D = [&](int comp, int i, int j, int k, int axis) {
        int di = axis == 0, dj = axis == 1, dk = axis == 2;
        double hh = axis == 0 ? hx : axis == 1 ? hy : ht;
        return (grid[gidx(i + di, j + dj, k + dk)][static_cast<size_t>(comp)] -
                grid[gidx(i - di, j - dj, k - dk)][static_cast<size_t>(comp)]) /
               (2.0 * hh);
    };
    enum { A = 0, Bc = 1, Cc = 2, P = 3, Q = 4, Fv = 5 };
    for (int i = 1; i < gn - 1; ++i)
        for (int j = 1; j < gn - 1; ++j)
            for (int k = 1; k < gn - 1; ++k) {
                double res[8] = {
                    D(A, i, j, k, 1) - D(Bc, i, j, k, 0),   // a_y = b_x
                    D(A, i, j, k, 2) - D(P, i, j, k, 0),    // a_t = p_x
                    D(Bc, i, j, k, 1) - D(Cc, i, j, k, 0),  // b_y = c_x
                    D(Bc, i, j, k, 2) - D(Q, i, j, k, 0),   // b_t = q_x
                    D(P, i, j, k, 1) - D(Q, i, j, k, 0),    // p_y = q_x
                    D(Cc, i, j, k, 2) - D(Q, i, j, k, 1),   // c_t = q_y
                    D(P, i, j, k, 2) - D(Fv, i, j, k, 0),   // p_t = f_x
                    D(Q, i, j, k, 2) - D(Fv, i, j, k, 1),   // q_t = f_y
                };
                for (double rr : res)
                    rep.max_system_residual = std::max(rep.max_system_residual, std::abs(rr));
            }
    return rep;
}

}  // namespace hirota
