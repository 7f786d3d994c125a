#include "hirota/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace hirota {

double CubicForm::eval(const std::array<double, 5>& v, const std::array<double, 5>& w,
                       const std::array<double, 5>& z) const {
    double s = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k)
                s += component(i, j, k) * v[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] *
                     z[static_cast<size_t>(k)];
    return s;
}

double Metric5::eval(const std::array<double, 5>& v, const std::array<double, 5>& w) const {
    double s = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            s += entry(i, j) * v[static_cast<size_t>(i)] * w[static_cast<size_t>(j)];
    return s;
}

CubicForm cubic_C(const std::array<double, 5>& first) {
    // Expand det of the symmetric differential as a degree-3 polynomial in the
    // five basis slots, using the jet algebra as polynomial arithmetic.
    std::array<Jet, 5> d = {Jet::variable(5, 3, 0, 0.0), Jet::variable(5, 3, 1, 0.0),
                            Jet::variable(5, 3, 2, 0.0), Jet::variable(5, 3, 3, 0.0),
                            Jet::variable(5, 3, 4, 0.0)};
    Jet df = Jet::constant(5, 3, 0.0);
    for (int i = 0; i < 5; ++i) df += first[static_cast<size_t>(i)] * d[static_cast<size_t>(i)];
    // det [[da, db, dp], [db, dc, dq], [dp, dq, df]]
    Jet det = d[0] * (d[2] * df - d[4] * d[4]) - d[1] * (d[1] * df - d[4] * d[3]) +
              d[3] * (d[1] * d[4] - d[2] * d[3]);

    CubicForm C;
    const JetLayout& L = det.layout();
    for (int pos = L.degree_offset(3); pos < L.degree_offset(4); ++pos) {
        // Polynomial coefficient -> symmetric tensor component: divide by the
        // number of index orderings, 3! / alpha!.
        double coef = det.coeff(pos);
        C.comp[static_cast<size_t>(pos - L.degree_offset(3))] = coef * L.factorial(pos) / 6.0;
    }
    return C;
}

Metric5 metric_Q(const std::array<double, 5>& first) {
    double fa = first[0], fb = first[1], fc = first[2], fp = first[3], fq = first[4];
    // Polynomial coefficients of the quadratic form; off-diagonal matrix
    // entries are half the printed cross coefficients.
    std::array<double, 15> poly{};
    poly[static_cast<size_t>(pair_index(0, 0))] = 4 * fa * fa + fa * fp * fp;
    poly[static_cast<size_t>(pair_index(0, 1))] = 8 * fa * fb + fb * fp * fp + 2 * fa * fp * fq;
    poly[static_cast<size_t>(pair_index(0, 3))] = 4 * fa * fp + fp * fp * fp;
    poly[static_cast<size_t>(pair_index(0, 2))] =
        fb * fb + 4 * fa * fc + fc * fp * fp + fa * fq * fq;
    poly[static_cast<size_t>(pair_index(0, 4))] = 2 * fb * fp + fp * fp * fq;
    poly[static_cast<size_t>(pair_index(1, 1))] = 3 * fb * fb + 4 * fa * fc + 2 * fb * fp * fq;
    poly[static_cast<size_t>(pair_index(1, 3))] = 2 * fb * fp + 4 * fa * fq + 2 * fp * fp * fq;
    poly[static_cast<size_t>(pair_index(1, 2))] = 8 * fb * fc + 2 * fc * fp * fq + fb * fq * fq;
    poly[static_cast<size_t>(pair_index(1, 4))] = 4 * fc * fp + 2 * fb * fq + 2 * fp * fq * fq;
    poly[static_cast<size_t>(pair_index(3, 3))] = -(4 * fa + fp * fp);
    poly[static_cast<size_t>(pair_index(2, 3))] = 2 * fb * fq + fp * fq * fq;
    poly[static_cast<size_t>(pair_index(3, 4))] = -(4 * fb + 2 * fp * fq);
    poly[static_cast<size_t>(pair_index(2, 2))] = 4 * fc * fc + fc * fq * fq;
    poly[static_cast<size_t>(pair_index(2, 4))] = 4 * fc * fq + fq * fq * fq;
    poly[static_cast<size_t>(pair_index(4, 4))] = -(4 * fc + fq * fq);

    Metric5 Q;
    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) {
            size_t idx = static_cast<size_t>(pair_index(i, j));
            Q.comp[idx] = (i == j) ? poly[idx] : 0.5 * poly[idx];
        }
    return Q;
}

namespace {

Eigen::Matrix<double, 5, 5> as_matrix(const Metric5& q) {
    Eigen::Matrix<double, 5, 5> M;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) M(i, j) = q.entry(i, j);
    return M;
}

}  // namespace

double metric_det(const Metric5& q) { return as_matrix(q).determinant(); }

std::array<double, 5> tangent_variety_vector(const std::array<double, 5>& first,
                                             const ConicPoint& pt, double t) {
    double fb = first[1], fc = first[2], fp = first[3], fq = first[4];
    double l = pt.lambda, m = pt.mu;
    double den = 2.0 * l - fq * m - fp;
    if (std::abs(den) < 1e-12)
        throw NumericError("tangent_variety_vector: branch point of the conic");
    double lp = (fb + 2.0 * fc * m + fq * l) / den;
    return {1.0, m + t, m * m + 2.0 * t * m, l + t * lp, m * l + t * (l + m * lp)};
}

GeometryReport geometry_report(const Expr& f, std::span<const std::array<double, 5>> bases,
                               std::uint64_t seed, double delta_floor) {
    GeometryReport rep;
    std::mt19937_64 rng(seed);

    for (const auto& base : bases) {
        Jet j = f.eval_jet(std::span<const double>(base.data(), 5), 2);
        Snapshot s = Snapshot::from_jet(j);
        double dlt = delta(s);
        double norm1 = 0.0;
        for (double x : s.first) norm1 += x * x;
        if (std::abs(dlt) <= delta_floor * (1.0 + norm1))
            throw NumericError("geometry_report: |Delta| below floor at a base point");

        GeometryPointReport pr;
        pr.base = base;
        pr.delta = dlt;

        Metric5 Q = metric_Q(s.first);
        CubicForm C = cubic_C(s.first);
        Eigen::Matrix<double, 5, 5> M = as_matrix(Q);
        double detq = M.determinant();
        double d4 = 3.0 * dlt * dlt * dlt * dlt;
        pr.det_identity_residual = std::abs(detq - d4) / (1.0 + std::abs(d4));

        Eigen::JacobiSVD<Eigen::Matrix<double, 5, 5>> svd(M, Eigen::ComputeFullU |
                                                                 Eigen::ComputeFullV);
        pr.q_condition = svd.singularValues()(0) / svd.singularValues()(4);
        Eigen::Matrix<double, 5, 5> Minv = M.inverse();

        // Normalization C -> 3 sqrt(3) Delta C.  Both relations below are of
        // even total degree in C, so the sign of Delta drops out.
        double norm = 3.0 * std::sqrt(3.0) * dlt;
        std::array<double, 35> Ct{};
        for (int m = 0; m < 35; ++m) Ct[static_cast<size_t>(m)] = norm * C.comp[static_cast<size_t>(m)];
        auto ct = [&](int i, int jj, int k) {
            return Ct[static_cast<size_t>(triple_index(i, jj, k))];
        };

        double apol = 0.0, cmax = 0.0, qmax = 0.0;
        for (int m = 0; m < 35; ++m) cmax = std::max(cmax, std::abs(Ct[static_cast<size_t>(m)]));
        for (int i = 0; i < 5; ++i)
            for (int jj = 0; jj < 5; ++jj) qmax = std::max(qmax, std::abs(Minv(i, jj)));
        for (int i = 0; i < 5; ++i) {
            double tr = 0.0;
            for (int k = 0; k < 5; ++k)
                for (int jj = 0; jj < 5; ++jj) tr += ct(i, jj, k) * Minv(k, jj);
            apol = std::max(apol, std::abs(tr));
        }
        pr.apolarity_residual = apol / (1.0 + cmax * qmax);

        // C~_jkr Q^rs C~_lns + cyclic = Q_jk Q_ln + Q_lj Q_kn + Q_kl Q_jn.
        double worst = 0.0, rhs_max = 0.0;
        for (int jj = 0; jj < 5; ++jj)
            for (int k = jj; k < 5; ++k)
                for (int l = 0; l < 5; ++l)
                    for (int n = l; n < 5; ++n) {
                        double lhs = 0.0;
                        for (int r = 0; r < 5; ++r)
                            for (int ss = 0; ss < 5; ++ss)
                                lhs += Minv(r, ss) *
                                       (ct(jj, k, r) * ct(l, n, ss) + ct(l, jj, r) * ct(k, n, ss) +
                                        ct(k, l, r) * ct(jj, n, ss));
                        double rhs = Q.entry(jj, k) * Q.entry(l, n) +
                                     Q.entry(l, jj) * Q.entry(k, n) +
                                     Q.entry(k, l) * Q.entry(jj, n);
                        rhs_max = std::max(rhs_max, std::abs(rhs));
                        worst = std::max(worst, std::abs(lhs - rhs));
                    }
        pr.second_relation_residual = worst / (1.0 + rhs_max);

        // Q vanishes on the tangent variety of the conic curve.
        try {
            auto pts = conic_sample(s, 4, rng);
            std::uniform_real_distribution<double> td(-1.0, 1.0);
            double tv = 0.0;
            for (const auto& cp : pts) {
                std::array<double, 5> w = tangent_variety_vector(s.first, cp, td(rng));
                double wn = 0.0;
                for (double x : w) wn += x * x;
                tv = std::max(tv, std::abs(Q.eval(w, w)) / ((1.0 + cmax) * wn));
            }
            pr.tangent_vanishing_residual = tv;
        } catch (const NumericError&) {
            pr.tangent_vanishing_residual = 0.0;  // complex conic: nothing to check
        }

        rep.max_det_identity_residual =
            std::max(rep.max_det_identity_residual, pr.det_identity_residual);
        rep.max_apolarity_residual = std::max(rep.max_apolarity_residual, pr.apolarity_residual);
        rep.max_second_relation_residual =
            std::max(rep.max_second_relation_residual, pr.second_relation_residual);
        rep.max_tangent_vanishing_residual =
            std::max(rep.max_tangent_vanishing_residual, pr.tangent_vanishing_residual);
        rep.points.push_back(pr);
    }

    // Flat-model facts on the rational normal curve.
    std::uniform_real_distribution<double> td(-2.0, 2.0);
    for (int it = 0; it < 10; ++it) {
        double t = td(rng);
        double x[5] = {1.0, t, t * t, t * t * t, t * t * t * t};
        double hankel = x[0] * (x[2] * x[4] - x[3] * x[3]) - x[1] * (x[1] * x[4] - x[3] * x[2]) +
                        x[2] * (x[1] * x[3] - x[2] * x[2]);
        rep.flat_hankel_residual =
            std::max(rep.flat_hankel_residual, std::abs(hankel) / (1.0 + x[4] * x[4]));
        double s2 = td(rng);
        double g[5] = {0.0, 1.0, 2.0 * t, 3.0 * t * t, 4.0 * t * t * t};
        double v[5];
        for (int i = 0; i < 5; ++i) v[i] = x[i] + s2 * g[i];
        double quad = v[0] * v[4] - 4.0 * v[1] * v[3] + 3.0 * v[2] * v[2];
        double vn = 0.0;
        for (double y : v) vn += y * y;
        rep.flat_quadric_residual =
            std::max(rep.flat_quadric_residual, std::abs(quad) / (1.0 + vn));
    }
    return rep;
}

}  // namespace hirota
