#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hirota/jet.hpp"

namespace hirota {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    size_t position;
};

// Immutable symbolic expression over a declared variable set.  Supports the
// arithmetic operators, unary minus, power, and the elementary functions
// exp, ln, sin, cos, tan, cot, sinh, cosh, tanh, coth, sqrt.
class Expr {
  public:
    Expr() = default;

    // Grammar: expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
    // factor := '-' factor | atom ('^' factor)? ; atom := number | ident
    // | ident '(' expr ')' | '(' expr ')'.  Numbers: decimal, scientific; rational
    // literals like 3/4 parse as a constant quotient and fold to a double.
    static Expr parse(const std::string& text, std::vector<std::string> vars);

    static Expr constant(double v, std::vector<std::string> vars);
    static Expr var(int index, std::vector<std::string> vars);

    bool valid() const { return node_ != nullptr; }
    const std::vector<std::string>& vars() const { return *vars_; }
    int nvars() const { return static_cast<int>(vars_->size()); }

    // Exact partial derivative with respect to the named variable.  No
    // simplification beyond constant folding of trivial zeros/ones.
    Expr diff(const std::string& v) const;
    Expr diff(int var_index) const;

    double eval(std::span<const double> point) const;
    // Truncated Taylor expansion around `base`.
    Jet eval_jet(std::span<const double> base, int order) const;
    // Evaluation with arbitrary jets substituted for the variables.
    Jet eval_jet(std::span<const Jet> values) const;

    // Whether the expression tree mentions the variable at all.
    bool depends_on(int var_index) const;

    std::string render() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr operator-() const;

    // Substitutes each variable by the given expression (all over the new
    // expressions' shared variable set).
    Expr substitute(std::span<const Expr> replacements) const;

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;
    Expr(NodePtr n, std::shared_ptr<const std::vector<std::string>> vars)
        : node_(std::move(n)), vars_(std::move(vars)) {}
    const NodePtr& node() const { return node_; }

  private:
    NodePtr node_;
    std::shared_ptr<const std::vector<std::string>> vars_;
};

}  // namespace hirota
