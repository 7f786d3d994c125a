#include "hirota/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

namespace hirota {

enum class NodeKind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Func };

enum class FuncId { Exp, Ln, Sin, Cos, Tan, Cot, Sinh, Cosh, Tanh, Coth, Sqrt };

struct Expr::Node {
    NodeKind kind;
    double value = 0.0;        // Const
    int var = -1;              // Var
    std::string var_name;      // Var
    FuncId func = FuncId::Exp; // Func
    NodePtr a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

const std::map<std::string, FuncId>& func_table() {
    static const std::map<std::string, FuncId> t = {
        {"exp", FuncId::Exp},   {"ln", FuncId::Ln},     {"sin", FuncId::Sin},
        {"cos", FuncId::Cos},   {"tan", FuncId::Tan},   {"cot", FuncId::Cot},
        {"sinh", FuncId::Sinh}, {"cosh", FuncId::Cosh}, {"tanh", FuncId::Tanh},
        {"coth", FuncId::Coth}, {"sqrt", FuncId::Sqrt}};
    return t;
}

const char* func_name(FuncId f) {
    for (const auto& [name, id] : func_table())
        if (id == f) return name.c_str();
    return "?";
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Const;
    n->value = v;
    return n;
}

NodePtr make_var(int idx, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Var;
    n->var = idx;
    n->var_name = std::move(name);
    return n;
}

NodePtr make_bin(NodeKind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_func(FuncId f, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Func;
    n->func = f;
    n->a = std::move(a);
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->kind == NodeKind::Const && n->value == v;
}

// Light constant folding so derivatives stay readable and cheap.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_bin(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_neg(std::move(b));
    return make_bin(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_bin(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    return make_bin(NodeKind::Div, std::move(a), std::move(b));
}

class Parser {
  public:
    Parser(const std::string& text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty input", 0);
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

  private:
    const std::string& text_;
    const std::vector<std::string>& vars_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (accept('+')) e = add(e, parse_term());
            else if (accept('-')) e = sub(e, parse_term());
            else return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        for (;;) {
            if (accept('*')) e = mul(e, parse_factor());
            else if (accept('/')) e = div(e, parse_factor());
            else return e;
        }
    }

    NodePtr parse_factor() {
        skip_ws();
        // Unary minus binds looser than '^': -a^2 is -(a^2).
        if (pos_ < text_.size() && text_[pos_] == '-') {
            ++pos_;
            return make_neg(parse_factor());
        }
        NodePtr base = parse_atom();
        if (accept('^')) return make_bin(NodeKind::Pow, base, parse_factor());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        size_t start = pos_;
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start);
        pos_ += static_cast<size_t>(end - begin);
        return make_const(v);
    }

    NodePtr parse_ident() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (peek('(')) {
            auto it = func_table().find(name);
            if (it == func_table().end())
                throw ParseError("unknown function '" + name + "'", start);
            ++pos_;  // '('
            NodePtr arg = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return make_func(it->second, arg);
        }
        for (size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return make_var(static_cast<int>(i), name);
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->kind) {
        case NodeKind::Const: return make_const(0.0);
        case NodeKind::Var: return make_const(n->var == var ? 1.0 : 0.0);
        case NodeKind::Add: return add(diff_node(n->a, var), diff_node(n->b, var));
        case NodeKind::Sub: return sub(diff_node(n->a, var), diff_node(n->b, var));
        case NodeKind::Mul:
            return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
        case NodeKind::Div: {
            // (a/b)' = a'/b - a b'/b^2
            NodePtr da = diff_node(n->a, var);
            NodePtr db = diff_node(n->b, var);
            return sub(div(da, n->b), div(mul(n->a, db), make_bin(NodeKind::Mul, n->b, n->b)));
        }
        case NodeKind::Pow: {
            NodePtr da = diff_node(n->a, var);
            NodePtr db = diff_node(n->b, var);
            if (n->b->kind == NodeKind::Const) {
                double r = n->b->value;
                // r * a^(r-1) * a'
                return mul(mul(make_const(r), make_bin(NodeKind::Pow, n->a, make_const(r - 1.0))),
                           da);
            }
            // a^b * (b' ln a + b a'/a)
            NodePtr lhs = make_bin(NodeKind::Pow, n->a, n->b);
            NodePtr inner = add(mul(db, make_func(FuncId::Ln, n->a)), div(mul(n->b, da), n->a));
            return mul(lhs, inner);
        }
        case NodeKind::Neg: return make_neg(diff_node(n->a, var));
        case NodeKind::Func: {
            NodePtr da = diff_node(n->a, var);
            NodePtr outer;
            const NodePtr& u = n->a;
            switch (n->func) {
                case FuncId::Exp: outer = make_func(FuncId::Exp, u); break;
                case FuncId::Ln: outer = div(make_const(1.0), u); break;
                case FuncId::Sin: outer = make_func(FuncId::Cos, u); break;
                case FuncId::Cos: outer = make_neg(make_func(FuncId::Sin, u)); break;
                case FuncId::Tan: {
                    NodePtr t = make_func(FuncId::Tan, u);
                    outer = add(make_const(1.0), make_bin(NodeKind::Mul, t, t));
                    break;
                }
                case FuncId::Cot: {
                    NodePtr t = make_func(FuncId::Cot, u);
                    outer = make_neg(add(make_const(1.0), make_bin(NodeKind::Mul, t, t)));
                    break;
                }
                case FuncId::Sinh: outer = make_func(FuncId::Cosh, u); break;
                case FuncId::Cosh: outer = make_func(FuncId::Sinh, u); break;
                case FuncId::Tanh: {
                    NodePtr t = make_func(FuncId::Tanh, u);
                    outer = sub(make_const(1.0), make_bin(NodeKind::Mul, t, t));
                    break;
                }
                case FuncId::Coth: {
                    NodePtr t = make_func(FuncId::Coth, u);
                    outer = sub(make_const(1.0), make_bin(NodeKind::Mul, t, t));
                    break;
                }
                case FuncId::Sqrt:
                    outer = div(make_const(0.5), make_func(FuncId::Sqrt, u));
                    break;
            }
            return mul(outer, da);
        }
    }
    throw std::logic_error("diff_node: unreachable");
}

double eval_func(FuncId f, double x, const NodePtr& arg_node) {
    auto fail = [&](const char* what) -> double {
        std::ostringstream os;
        os << what << " in subexpression '" << func_name(f) << "(...)' (argument " << x << ")";
        throw DomainError(os.str());
    };
    switch (f) {
        case FuncId::Exp: return std::exp(x);
        case FuncId::Ln: return x > 0.0 ? std::log(x) : fail("ln of non-positive value");
        case FuncId::Sin: return std::sin(x);
        case FuncId::Cos: return std::cos(x);
        case FuncId::Tan: return std::tan(x);
        case FuncId::Cot: {
            double t = std::tan(x);
            return t != 0.0 ? 1.0 / t : fail("cot at zero of tan");
        }
        case FuncId::Sinh: return std::sinh(x);
        case FuncId::Cosh: return std::cosh(x);
        case FuncId::Tanh: return std::tanh(x);
        case FuncId::Coth: {
            double t = std::tanh(x);
            return t != 0.0 ? 1.0 / t : fail("coth at zero");
        }
        case FuncId::Sqrt: return x > 0.0 ? std::sqrt(x) : fail("sqrt of non-positive value");
    }
    (void)arg_node;
    throw std::logic_error("eval_func: unreachable");
}

double eval_node(const NodePtr& n, std::span<const double> point) {
    switch (n->kind) {
        case NodeKind::Const: return n->value;
        case NodeKind::Var: return point[static_cast<size_t>(n->var)];
        case NodeKind::Add: return eval_node(n->a, point) + eval_node(n->b, point);
        case NodeKind::Sub: return eval_node(n->a, point) - eval_node(n->b, point);
        case NodeKind::Mul: return eval_node(n->a, point) * eval_node(n->b, point);
        case NodeKind::Div: {
            double d = eval_node(n->b, point);
            if (d == 0.0) throw DomainError("division by zero");
            return eval_node(n->a, point) / d;
        }
        case NodeKind::Pow: {
            double base = eval_node(n->a, point);
            double e = eval_node(n->b, point);
            double r = std::round(e);
            if (e == r && std::abs(e) < 64) return std::pow(base, e);
            if (base <= 0.0)
                throw DomainError("power with non-integer exponent requires positive base");
            return std::pow(base, e);
        }
        case NodeKind::Neg: return -eval_node(n->a, point);
        case NodeKind::Func: return eval_func(n->func, eval_node(n->a, point), n->a);
    }
    throw std::logic_error("eval_node: unreachable");
}

Jet jet_func(FuncId f, const Jet& x) {
    switch (f) {
        case FuncId::Exp: return jet_exp(x);
        case FuncId::Ln: return jet_ln(x);
        case FuncId::Sin: return jet_sin(x);
        case FuncId::Cos: return jet_cos(x);
        case FuncId::Tan: return jet_tan(x);
        case FuncId::Cot: return jet_cot(x);
        case FuncId::Sinh: return jet_sinh(x);
        case FuncId::Cosh: return jet_cosh(x);
        case FuncId::Tanh: return jet_tanh(x);
        case FuncId::Coth: return jet_coth(x);
        case FuncId::Sqrt: return jet_sqrt(x);
    }
    throw std::logic_error("jet_func: unreachable");
}

Jet jet_node(const NodePtr& n, std::span<const Jet> values) {
    const Jet& proto = values[0];
    switch (n->kind) {
        case NodeKind::Const:
            return Jet::constant(proto.nvars(), proto.order(), n->value);
        case NodeKind::Var: return values[static_cast<size_t>(n->var)];
        case NodeKind::Add: return jet_node(n->a, values) + jet_node(n->b, values);
        case NodeKind::Sub: return jet_node(n->a, values) - jet_node(n->b, values);
        case NodeKind::Mul: return jet_node(n->a, values) * jet_node(n->b, values);
        case NodeKind::Div: return jet_node(n->a, values) / jet_node(n->b, values);
        case NodeKind::Pow: {
            Jet base = jet_node(n->a, values);
            if (n->b->kind == NodeKind::Const) {
                double e = n->b->value;
                double r = std::round(e);
                if (e == r && std::abs(e) < 64) return base.pow_int(static_cast<long long>(r));
                return base.pow_real(e);
            }
            // Variable exponent: exp(b ln a), positive base required.
            Jet e = jet_node(n->b, values);
            return jet_exp(e * jet_ln(base));
        }
        case NodeKind::Neg: return -jet_node(n->a, values);
        case NodeKind::Func: return jet_func(n->func, jet_node(n->a, values));
    }
    throw std::logic_error("jet_node: unreachable");
}

bool depends_node(const NodePtr& n, int var) {
    switch (n->kind) {
        case NodeKind::Const: return false;
        case NodeKind::Var: return n->var == var;
        case NodeKind::Neg:
        case NodeKind::Func: return depends_node(n->a, var);
        default: return depends_node(n->a, var) || depends_node(n->b, var);
    }
}

void render_node(const NodePtr& n, std::ostringstream& os) {
    switch (n->kind) {
        case NodeKind::Const: os << n->value; return;
        case NodeKind::Var: os << n->var_name; return;
        case NodeKind::Add:
            os << '(';
            render_node(n->a, os);
            os << " + ";
            render_node(n->b, os);
            os << ')';
            return;
        case NodeKind::Sub:
            os << '(';
            render_node(n->a, os);
            os << " - ";
            render_node(n->b, os);
            os << ')';
            return;
        case NodeKind::Mul:
            os << '(';
            render_node(n->a, os);
            os << " * ";
            render_node(n->b, os);
            os << ')';
            return;
        case NodeKind::Div:
            os << '(';
            render_node(n->a, os);
            os << " / ";
            render_node(n->b, os);
            os << ')';
            return;
        case NodeKind::Pow:
            os << '(';
            render_node(n->a, os);
            os << '^';
            render_node(n->b, os);
            os << ')';
            return;
        case NodeKind::Neg:
            os << "(-";
            render_node(n->a, os);
            os << ')';
            return;
        case NodeKind::Func:
            os << func_name(n->func) << '(';
            render_node(n->a, os);
            os << ')';
            return;
    }
}

NodePtr substitute_node(const NodePtr& n, std::span<const Expr> repl) {
    switch (n->kind) {
        case NodeKind::Const: return make_const(n->value);
        case NodeKind::Var: return repl[static_cast<size_t>(n->var)].node();
        case NodeKind::Neg: return make_neg(substitute_node(n->a, repl));
        case NodeKind::Func: return make_func(n->func, substitute_node(n->a, repl));
        default:
            return make_bin(n->kind, substitute_node(n->a, repl), substitute_node(n->b, repl));
    }
}

}  // namespace

Expr Expr::parse(const std::string& text, std::vector<std::string> vars) {
    auto vp = std::make_shared<const std::vector<std::string>>(std::move(vars));
    Parser p(text, *vp);
    return Expr(p.run(), vp);
}

Expr Expr::constant(double v, std::vector<std::string> vars) {
    auto vp = std::make_shared<const std::vector<std::string>>(std::move(vars));
    return Expr(make_const(v), vp);
}

Expr Expr::var(int index, std::vector<std::string> vars) {
    auto vp = std::make_shared<const std::vector<std::string>>(std::move(vars));
    return Expr(make_var(index, (*vp)[static_cast<size_t>(index)]), vp);
}

Expr Expr::diff(const std::string& v) const {
    for (size_t i = 0; i < vars_->size(); ++i)
        if ((*vars_)[i] == v) return diff(static_cast<int>(i));
    throw std::invalid_argument("diff: undeclared variable '" + v + "'");
}

Expr Expr::diff(int var_index) const {
    if (var_index < 0 || var_index >= nvars())
        throw std::invalid_argument("diff: variable index out of range");
    return Expr(diff_node(node_, var_index), vars_);
}

double Expr::eval(std::span<const double> point) const { return eval_node(node_, point); }

Jet Expr::eval_jet(std::span<const double> base, int order) const {
    std::vector<Jet> values;
    values.reserve(base.size());
    for (size_t i = 0; i < base.size(); ++i)
        values.push_back(Jet::variable(static_cast<int>(base.size()), order,
                                       static_cast<int>(i), base[i]));
    return jet_node(node_, values);
}

Jet Expr::eval_jet(std::span<const Jet> values) const { return jet_node(node_, values); }

bool Expr::depends_on(int var_index) const { return depends_node(node_, var_index); }

std::string Expr::render() const {
    std::ostringstream os;
    render_node(node_, os);
    return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node_, b.node_), a.vars_); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node_, b.node_), a.vars_); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node_, b.node_), a.vars_); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.node_, b.node_), a.vars_); }
Expr Expr::operator-() const { return Expr(make_neg(node_), vars_); }

Expr Expr::substitute(std::span<const Expr> replacements) const {
    if (static_cast<int>(replacements.size()) != nvars())
        throw std::invalid_argument("substitute: replacement count mismatch");
    return Expr(substitute_node(node_, replacements), replacements[0].vars_);
}

}  // namespace hirota
