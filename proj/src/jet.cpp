#include "hirota/jet.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace hirota {

namespace {

double mi_factorial(const MultiIndex& mi) {
    static const double fact[4] = {1.0, 1.0, 2.0, 6.0};
    double r = 1.0;
    for (auto e : mi) r *= fact[e];
    return r;
}

}  // namespace

JetLayout::JetLayout(int nvars) : nvars_(nvars) {
    degree_offsets_[0] = 0;
    // Degree d monomials are enumerated as sorted variable tuples
    // (i1 <= i2 <= ... <= id) in lexicographic order.
    for (int d = 0; d <= kMaxJetOrder; ++d) {
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur;
        auto rec = [&](auto&& self, int start) -> void {
            if (static_cast<int>(cur.size()) == d) {
                tuples.push_back(cur);
                return;
            }
            for (int v = start; v < nvars; ++v) {
                cur.push_back(v);
                self(self, v);
                cur.pop_back();
            }
        };
        rec(rec, 0);
        for (const auto& t : tuples) {
            MultiIndex mi{};
            for (int v : t) mi[v]++;
            indices_.push_back(mi);
            degrees_.push_back(d);
            factorials_.push_back(mi_factorial(mi));
        }
        degree_offsets_[d + 1] = static_cast<int>(indices_.size());
    }
    const int n = size();
    mul_table_.assign(static_cast<size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (degrees_[i] + degrees_[j] > kMaxJetOrder) continue;
            MultiIndex s{};
            for (int v = 0; v < nvars; ++v)
                s[v] = static_cast<std::uint8_t>(indices_[i][v] + indices_[j][v]);
            mul_table_[static_cast<size_t>(i) * n + j] = position(s);
        }
    }
}

int JetLayout::position(const MultiIndex& mi) const {
    int deg = 0;
    for (auto e : mi) deg += e;
    if (deg > kMaxJetOrder) return -1;
    for (int p = degree_offsets_[deg]; p < degree_offsets_[deg + 1]; ++p)
        if (indices_[p] == mi) return p;
    return -1;
}

const JetLayout& JetLayout::get(int nvars) {
    static std::mutex mu;
    static std::array<const JetLayout*, kMaxJetVars + 1> cache{};
    if (nvars < 1 || nvars > kMaxJetVars)
        throw std::invalid_argument("JetLayout: nvars must be in 1..6");
    std::lock_guard<std::mutex> lock(mu);
    if (!cache[nvars]) cache[nvars] = new JetLayout(nvars);
    return *cache[nvars];
}

Jet::Jet(int nvars, int order)
    : nvars_(nvars), order_(order), layout_(&JetLayout::get(nvars)) {
    if (order < 0 || order > kMaxJetOrder)
        throw std::invalid_argument("Jet: order must be in 0..3");
    coeffs_.assign(layout_->degree_offset(order + 1), 0.0);
}

Jet Jet::constant(int nvars, int order, double value) {
    Jet j(nvars, order);
    j.coeffs_[0] = value;
    return j;
}

Jet Jet::variable(int nvars, int order, int var, double value) {
    Jet j(nvars, order);
    j.coeffs_[0] = value;
    if (order >= 1) j.coeffs_[1 + var] = 1.0;
    return j;
}

double Jet::coeff(const MultiIndex& mi) const {
    int pos = layout_->position(mi);
    if (pos < 0 || pos >= size()) return 0.0;
    return coeffs_[pos];
}

double Jet::derivative(const MultiIndex& mi) const {
    int pos = layout_->position(mi);
    if (pos < 0 || pos >= size())
        throw std::invalid_argument("Jet::derivative: |alpha| exceeds jet order");
    return coeffs_[pos] * layout_->factorial(pos);
}

void Jet::check_compatible(const Jet& o) const {
    if (nvars_ != o.nvars_ || order_ != o.order_)
        throw std::invalid_argument("Jet: operand nvars/order mismatch");
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    check_compatible(o);
    for (int i = 0; i < size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_compatible(o);
    for (int i = 0; i < size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    const JetLayout& L = *a.layout_;
    Jet r(a.nvars_, a.order_);
    const int n = a.size();
    for (int i = 0; i < n; ++i) {
        double ai = a.coeffs_[i];
        if (ai == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            int p = L.product(i, j);
            if (p >= 0 && p < n) r.coeffs_[p] += ai * b.coeffs_[j];
        }
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }

Jet operator/(double s, const Jet& a) {
    double v0 = a.value();
    if (v0 == 0.0) throw DomainError("jet division by jet with zero constant term");
    // 1/(v0(1+w)) = (1/v0)(1 - w + w^2 - w^3), w = (a - v0)/v0.
    return a.compose({s / v0, -s / (v0 * v0), 2.0 * s / (v0 * v0 * v0),
                      -6.0 * s / (v0 * v0 * v0 * v0)});
}

Jet Jet::pow_int(long long n) const {
    if (n < 0) return 1.0 / pow_int(-n);
    Jet r = Jet::constant(nvars_, order_, 1.0);
    Jet base = *this;
    while (n > 0) {
        if (n & 1) r = r * base;
        base = base * base;
        n >>= 1;
    }
    return r;
}

Jet Jet::pow_real(double r) const {
    double v = value();
    if (v <= 0.0) throw DomainError("jet pow with non-integer exponent requires positive base");
    double p = std::pow(v, r);
    return compose({p, r * p / v, r * (r - 1.0) * p / (v * v),
                    r * (r - 1.0) * (r - 2.0) * p / (v * v * v)});
}

Jet Jet::compose(const std::array<double, 4>& d) const {
    // F(v0 + h) truncated at order 3; h = jet minus its constant term.
    Jet h = *this;
    h.coeffs_[0] = 0.0;
    Jet r = Jet::constant(nvars_, order_, d[0]);
    if (order_ >= 1) r += d[1] * h;
    if (order_ >= 2) {
        Jet h2 = h * h;
        r += (d[2] / 2.0) * h2;
        if (order_ >= 3) r += (d[3] / 6.0) * (h2 * h);
    }
    return r;
}

Jet Jet::permute_vars(std::span<const int> perm) const {
    if (static_cast<int>(perm.size()) != nvars_)
        throw std::invalid_argument("Jet::permute_vars: permutation size mismatch");
    Jet r(nvars_, order_);
    for (int pos = 0; pos < size(); ++pos) {
        const MultiIndex& mi = layout_->index(pos);
        MultiIndex t{};
        for (int v = 0; v < nvars_; ++v) t[v] = mi[perm[v]];
        r.coeffs_[layout_->position(t)] = coeffs_[pos];
    }
    return r;
}

Jet jet_exp(const Jet& j) {
    double e = std::exp(j.value());
    return j.compose({e, e, e, e});
}

Jet jet_ln(const Jet& j) {
    double v = j.value();
    if (v <= 0.0) throw DomainError("ln of non-positive value");
    return j.compose({std::log(v), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)});
}

Jet jet_sin(const Jet& j) {
    double s = std::sin(j.value()), c = std::cos(j.value());
    return j.compose({s, c, -s, -c});
}

Jet jet_cos(const Jet& j) {
    double s = std::sin(j.value()), c = std::cos(j.value());
    return j.compose({c, -s, -c, s});
}

Jet jet_tan(const Jet& j) {
    double t = std::tan(j.value());
    double s = 1.0 + t * t;  // sec^2
    return j.compose({t, s, 2.0 * s * t, s * (4.0 * t * t + 2.0 * s)});
}

Jet jet_cot(const Jet& j) {
    double t = std::tan(j.value());
    if (t == 0.0) throw DomainError("cot at a zero of tan");
    double ct = 1.0 / t;
    double s = 1.0 + ct * ct;  // csc^2
    return j.compose({ct, -s, 2.0 * s * ct, -s * (4.0 * ct * ct + 2.0 * s)});
}

Jet jet_sinh(const Jet& j) {
    double s = std::sinh(j.value()), c = std::cosh(j.value());
    return j.compose({s, c, s, c});
}

Jet jet_cosh(const Jet& j) {
    double s = std::sinh(j.value()), c = std::cosh(j.value());
    return j.compose({c, s, c, s});
}

Jet jet_tanh(const Jet& j) {
    double t = std::tanh(j.value());
    double s = 1.0 - t * t;  // sech^2
    return j.compose({t, s, -2.0 * s * t, s * (4.0 * t * t - 2.0 * s)});
}

Jet jet_coth(const Jet& j) {
    double t = std::tanh(j.value());
    if (t == 0.0) throw DomainError("coth at zero");
    double ct = 1.0 / t;
    double s = ct * ct - 1.0;  // csch^2
    return j.compose({ct, -s, 2.0 * s * ct, -s * (4.0 * ct * ct + 2.0 * s)});
}

Jet jet_sqrt(const Jet& j) {
    double v = j.value();
    if (v <= 0.0) throw DomainError("sqrt of non-positive value");
    double r = std::sqrt(v);
    return j.compose({r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v)});
}

}  // namespace hirota
