#include "hirota/dispersion.hpp"

#include <algorithm>
#include <cmath>

namespace hirota {

int pair_index(int i, int j) {
    if (i > j) std::swap(i, j);
    // Row offsets for i = 0..4 over 5 variables: 0, 5, 9, 12, 14.
    static const int off[5] = {0, 5, 9, 12, 14};
    return off[i] + (j - i);
}

int triple_index(int i, int j, int k) {
    MultiIndex mi{};
    mi[i]++;
    mi[j]++;
    mi[k]++;
    const JetLayout& L = JetLayout::get(5);
    return L.position(mi) - L.degree_offset(3);
}

Snapshot Snapshot::from_jet(const Jet& j) {
    if (j.nvars() != 5 || j.order() < 2)
        throw std::invalid_argument("Snapshot::from_jet: need an order >= 2 jet in 5 variables");
    Snapshot s;
    const JetLayout& L = j.layout();
    for (int v = 0; v < 5; ++v) s.first[static_cast<size_t>(v)] = j.coeff(1 + v);
    for (int pos = L.degree_offset(2); pos < L.degree_offset(3); ++pos)
        s.second[static_cast<size_t>(pos - L.degree_offset(2))] =
            j.coeff(pos) * L.factorial(pos);
    if (j.order() >= 3) {
        std::array<double, 35> t{};
        for (int pos = L.degree_offset(3); pos < L.degree_offset(4); ++pos)
            t[static_cast<size_t>(pos - L.degree_offset(3))] = j.coeff(pos) * L.factorial(pos);
        s.third = t;
    }
    return s;
}

double delta(const Snapshot& s) {
    double fa = s.f1(kVarA), fb = s.f1(kVarB), fc = s.f1(kVarC);
    double fp = s.f1(kVarP), fq = s.f1(kVarQ);
    return fb * fb + fb * fp * fq - fa * fq * fq - fc * fp * fp - 4.0 * fa * fc;
}

double conic_residual(const Snapshot& s, const ConicPoint& pt) {
    double l = pt.lambda, m = pt.mu;
    double v = l * l - (s.f1(kVarA) + s.f1(kVarB) * m + s.f1(kVarC) * m * m +
                        s.f1(kVarP) * l + s.f1(kVarQ) * l * m);
    return std::abs(v) / (1.0 + l * l + m * m);
}

std::vector<ConicPoint> conic_sample(const Snapshot& s, int count, std::uint64_t seed,
                                     const SamplerConfig& cfg) {
    std::mt19937_64 rng(seed);
    return conic_sample(s, count, rng, cfg);
}

std::vector<ConicPoint> conic_sample(const Snapshot& s, int count, std::mt19937_64& rng,
                                     const SamplerConfig& cfg) {
    double norm1 = 0.0;
    for (double v : s.first) norm1 += v * v;
    if (std::abs(delta(s)) <= cfg.degeneracy_floor * (1.0 + norm1))
        throw NumericError("degenerate conic: |Delta| below floor");

    std::uniform_real_distribution<double> mu_dist(cfg.mu_min, cfg.mu_max);
    std::uniform_int_distribution<int> root_dist(0, 1);
    std::vector<ConicPoint> points;
    points.reserve(static_cast<size_t>(count));
    long long budget = 100ll * count;
    while (static_cast<int>(points.size()) < count) {
        if (budget-- <= 0)
            throw NumericError(
                "complex dispersion: sampling over complex lambda not supported");
        double mu = mu_dist(rng);
        bool separated = true;
        for (const auto& pt : points)
            if (std::abs(pt.mu - mu) < cfg.mu_separation) { separated = false; break; }
        if (!separated) continue;
        // lambda^2 - (f_p + f_q mu) lambda - (f_a + f_b mu + f_c mu^2) = 0
        double bq = s.f1(kVarP) + s.f1(kVarQ) * mu;
        double cq = s.f1(kVarA) + s.f1(kVarB) * mu + s.f1(kVarC) * mu * mu;
        double disc = bq * bq + 4.0 * cq;
        if (disc < 0.0) continue;
        double sq = std::sqrt(disc);
        double lambda = root_dist(rng) ? 0.5 * (bq + sq) : 0.5 * (bq - sq);
        points.push_back({lambda, mu});
    }
    return points;
}

PairData pair_data(const Snapshot& s, const ConicPoint& pi, const ConicPoint& pj,
                   double degeneracy_floor) {
    double li = pi.lambda, mi = pi.mu, lj = pj.lambda, mj = pj.mu;
    PairData r;
    r.N = s.f2(0, 0) + s.f2(0, 1) * (mi + mj) + s.f2(0, 2) * (mi * mi + mj * mj) +
          s.f2(0, 3) * (li + lj) + s.f2(0, 4) * (li * mi + lj * mj) +
          s.f2(1, 1) * mi * mj + s.f2(1, 2) * mi * mj * (mi + mj) +
          s.f2(1, 3) * (li * mj + lj * mi) + s.f2(1, 4) * mi * mj * (li + lj) +
          s.f2(2, 2) * mi * mi * mj * mj + s.f2(2, 3) * (li * mj * mj + lj * mi * mi) +
          s.f2(2, 4) * mi * mj * (li * mj + lj * mi) + s.f2(3, 3) * li * lj +
          s.f2(3, 4) * li * lj * (mi + mj) + s.f2(4, 4) * li * lj * mi * mj;
    r.D = -2.0 * li * lj + 2.0 * s.f1(kVarA) + s.f1(kVarB) * (mi + mj) +
          2.0 * s.f1(kVarC) * mi * mj + s.f1(kVarP) * (li + lj) +
          s.f1(kVarQ) * (li * mj + lj * mi);
    double scale = 1.0 + li * li + lj * lj + mi * mi + mj * mj;
    if (std::abs(r.D) <= degeneracy_floor * scale)
        throw NumericError("degenerate pair: |D_ij| below floor (resample points)");
    r.B = r.N / r.D;
    return r;
}

double u_identity_residual(const Snapshot& s, const ConicPoint& pi, const ConicPoint& pj,
                           double degeneracy_floor) {
    PairData pd = pair_data(s, pi, pj, degeneracy_floor);
    double li = pi.lambda, mi = pi.mu, lj = pj.lambda, mj = pj.mu;
    double fa = s.f1(kVarA), fb = s.f1(kVarB), fc = s.f1(kVarC);
    double fp = s.f1(kVarP), fq = s.f1(kVarQ);
    double dm = mi - mj;
    double dlt = delta(s);
    if (std::abs(dm) <= 0.05 || std::abs(dlt) <= degeneracy_floor)
        throw NumericError("u_identity_residual: mu separation or Delta below floor");
    double bracket = 2.0 * fa + (mi + mj) * fb + 2.0 * mi * mj * fc - (li + lj) * fp -
                     (li * mj + lj * mi) * fq + fp * fp + (mi + mj) * fp * fq +
                     mi * mj * fq * fq + 2.0 * li * lj;
    double u = bracket / (dm * dm * dlt);
    double inv = 1.0 / pd.D;
    return std::abs(inv - u) / (1.0 + std::abs(inv));
}

}  // namespace hirota
