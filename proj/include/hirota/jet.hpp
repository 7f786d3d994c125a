#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hirota {

// Thrown when a jet operation leaves the domain of the composed function
// (division by a jet with zero constant term, ln of a non-positive value, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kMaxJetVars = 6;
constexpr int kMaxJetOrder = 3;

// Exponent vector of a monomial in up to six variables.
using MultiIndex = std::array<std::uint8_t, kMaxJetVars>;

// Enumeration of all multi-indices with |alpha| <= 3 over `nvars` variables,
// in graded lexicographic order: ascending total degree, and within a degree
// the variable tuples sorted ascending (aa, ab, ac, ..., bb, bc, ...).
// This order fixes the coefficient layout of Jet and, in particular, the
// layout of the 15-vector of second and the 35-vector of third derivatives
// used by the dispersion and integrability modules.
class JetLayout {
  public:
    static const JetLayout& get(int nvars);

    int nvars() const { return nvars_; }
    int size() const { return static_cast<int>(indices_.size()); }
    const MultiIndex& index(int pos) const { return indices_[pos]; }
    int degree(int pos) const { return degrees_[pos]; }
    // Position of a multi-index, or -1 if |alpha| > 3.
    int position(const MultiIndex& mi) const;
    // Position of the product monomial, or -1 if the degrees overflow.
    int product(int pos1, int pos2) const { return mul_table_[pos1 * size() + pos2]; }
    double factorial(int pos) const { return factorials_[pos]; }
    // Offset of the first multi-index of the given total degree.
    int degree_offset(int deg) const { return degree_offsets_[deg]; }

  private:
    explicit JetLayout(int nvars);

    int nvars_;
    std::vector<MultiIndex> indices_;
    std::vector<int> degrees_;
    std::vector<double> factorials_;  // alpha!
    std::vector<int> mul_table_;
    std::array<int, kMaxJetOrder + 2> degree_offsets_{};
};

// Truncated multivariate Taylor expansion of order <= 3 in up to 6 variables.
// Coefficients are Taylor coefficients, i.e. d^alpha f / alpha!.
class Jet {
  public:
    Jet(int nvars, int order);
    static Jet constant(int nvars, int order, double value);
    // The jet of the coordinate function (value + x_var).
    static Jet variable(int nvars, int order, int var, double value);

    int nvars() const { return nvars_; }
    int order() const { return order_; }

    double value() const { return coeffs_[0]; }
    double coeff(int pos) const { return coeffs_[pos]; }
    double& coeff(int pos) { return coeffs_[pos]; }
    double coeff(const MultiIndex& mi) const;
    int size() const { return static_cast<int>(coeffs_.size()); }

    // d^alpha f at the base point, i.e. alpha! * coeff(alpha).
    double derivative(const MultiIndex& mi) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { a.coeffs_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.coeffs_[0] += s; return a; }
    friend Jet operator-(Jet a, double s) { a.coeffs_[0] -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; r.coeffs_[0] += s; return r; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(double s, const Jet& a);
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

    // Integer power by repeated multiplication; negative exponents via the
    // reciprocal (constant term must be nonzero).
    Jet pow_int(long long n) const;
    // Real power: defined only for positive constant term.
    Jet pow_real(double r) const;
    // Composition with a univariate function given its value and first three
    // derivatives at the constant term of this jet.
    Jet compose(const std::array<double, 4>& derivs) const;

    const JetLayout& layout() const { return *layout_; }

    // Reorders the variables: result variable i is this jet's variable
    // perm[i].  Used to translate between coordinate conventions.
    Jet permute_vars(std::span<const int> perm) const;

  private:
    int nvars_;
    int order_;
    const JetLayout* layout_;
    std::vector<double> coeffs_;

    void check_compatible(const Jet& o) const;
};

Jet jet_exp(const Jet& j);
Jet jet_ln(const Jet& j);
Jet jet_sin(const Jet& j);
Jet jet_cos(const Jet& j);
Jet jet_tan(const Jet& j);
Jet jet_cot(const Jet& j);
Jet jet_sinh(const Jet& j);
Jet jet_cosh(const Jet& j);
Jet jet_tanh(const Jet& j);
Jet jet_coth(const Jet& j);
Jet jet_sqrt(const Jet& j);

}  // namespace hirota
