// Scalar expressions in chart coordinates: recursive-descent parser, printer,
// and evaluation over any forward-mode scalar type.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)?
//   atom   := number | 'x' integer | func '(' expr ')' | '(' expr ')' | '-' atom
//   func   in {sin, cos, exp, sqrt}

#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grm/dual.hpp"

namespace grm {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ExprOp { Const, Var, Neg, Sin, Cos, Exp, Sqrt, Add, Sub, Mul, Div, Pow };

struct ExprNode {
    ExprOp op;
    double value = 0.0;   // Const
    int var = 0;          // Var
    int exponent = 0;     // Pow
    std::shared_ptr<const ExprNode> lhs, rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

class Expr {
public:
    Expr() = default;
    Expr(ExprPtr root, int dim) : root_(std::move(root)), dim_(dim) {}

    const ExprPtr& root() const { return root_; }
    int dim() const { return dim_; }
    bool valid() const { return root_ != nullptr; }

private:
    ExprPtr root_;
    int dim_ = 0;
};

// --- construction helpers ---------------------------------------------------

inline ExprPtr e_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Const;
    n->value = v;
    return n;
}
inline ExprPtr e_var(int i) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Var;
    n->var = i;
    return n;
}
inline ExprPtr e_unary(ExprOp op, ExprPtr c) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(c);
    return n;
}
inline ExprPtr e_binary(ExprOp op, ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}
inline ExprPtr e_pow(ExprPtr base, int k) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Pow;
    n->lhs = std::move(base);
    n->exponent = k;
    return n;
}

inline bool expr_equal(const ExprPtr& x, const ExprPtr& y) {
    if (x == y) return true;
    if (!x || !y) return false;
    if (x->op != y->op) return false;
    switch (x->op) {
        case ExprOp::Const: return x->value == y->value;
        case ExprOp::Var: return x->var == y->var;
        case ExprOp::Pow:
            return x->exponent == y->exponent && expr_equal(x->lhs, y->lhs);
        default:
            return expr_equal(x->lhs, y->lhs) && expr_equal(x->rhs, y->rhs);
    }
}

// Re-home an expression into a larger chart, offsetting variable indices.
inline ExprPtr shift_vars(const ExprPtr& e, int offset) {
    if (!e) return nullptr;
    auto n = std::make_shared<ExprNode>(*e);
    if (n->op == ExprOp::Var) n->var += offset;
    n->lhs = shift_vars(e->lhs, offset);
    n->rhs = shift_vars(e->rhs, offset);
    return n;
}

// --- parser -----------------------------------------------------------------

namespace detail {

class Parser {
public:
    Parser(const std::string& text, int dim) : s_(text), dim_(dim) {}

    ExprPtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int dim_;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr expr() {
        auto lhs = term();
        for (;;) {
            if (eat('+')) lhs = e_binary(ExprOp::Add, lhs, term());
            else if (eat('-')) lhs = e_binary(ExprOp::Sub, lhs, term());
            else return lhs;
        }
    }

    ExprPtr term() {
        auto lhs = factor();
        for (;;) {
            if (eat('*')) lhs = e_binary(ExprOp::Mul, lhs, factor());
            else if (eat('/')) lhs = e_binary(ExprOp::Div, lhs, factor());
            else return lhs;
        }
    }

    ExprPtr factor() {
        auto base = atom();
        if (eat('^')) return e_pow(base, integer());
        return base;
    }

    int integer() {
        skip_ws();
        std::size_t start = pos_;
        bool neg = false;
        if (pos_ < s_.size() && s_[pos_] == '-') { neg = true; ++pos_; }
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw ParseError("expected integer exponent", pos_);
        long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            if (v > 1000000) throw ParseError("exponent too large", start);
            ++pos_;
        }
        return static_cast<int>(neg ? -v : v);
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '-') {
            ++pos_;
            auto inner = atom();
            if (inner->op == ExprOp::Const) return e_const(-inner->value);
            return e_unary(ExprOp::Neg, inner);
        }
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr number() {
        std::size_t start = pos_;
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start);
        pos_ += static_cast<std::size_t>(end - begin);
        return e_const(v);
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        std::string name;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
            name += s_[pos_++];
        if (name == "x") {
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                throw ParseError("expected coordinate index after 'x'", pos_);
            long idx = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                idx = idx * 10 + (s_[pos_++] - '0');
            if (idx >= dim_)
                throw ParseError("variable index " + std::to_string(idx) +
                                     " out of range for dimension " + std::to_string(dim_),
                                 start);
            return e_var(static_cast<int>(idx));
        }
        ExprOp op;
        if (name == "sin") op = ExprOp::Sin;
        else if (name == "cos") op = ExprOp::Cos;
        else if (name == "exp") op = ExprOp::Exp;
        else if (name == "sqrt") op = ExprOp::Sqrt;
        else throw ParseError("unknown identifier '" + name + "'", start);
        if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
        auto arg = expr();
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        return e_unary(op, arg);
    }
};

inline int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;
    }
}

inline void print_node(const ExprPtr& e, std::string& out, int parent_prec, bool rhs_of_parent) {
    const int prec = precedence(e->op);
    const bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_parent);
    if (parens) out += '(';
    switch (e->op) {
        case ExprOp::Const: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", e->value);
            if (e->value < 0 && !parens) {
                out += '(';
                out += buf;
                out += ')';
                if (parens) out += ')';
                return;
            }
            out += buf;
            break;
        }
        case ExprOp::Var: out += 'x' + std::to_string(e->var); break;
        case ExprOp::Neg:
            // the grammar's unary minus takes an atom, and '^' binds tighter,
            // so anything below atom precedence needs parentheses
            out += '-';
            print_node(e->lhs, out, precedence(ExprOp::Pow), true);
            break;
        case ExprOp::Sin:
        case ExprOp::Cos:
        case ExprOp::Exp:
        case ExprOp::Sqrt:
            out += e->op == ExprOp::Sin   ? "sin"
                   : e->op == ExprOp::Cos ? "cos"
                   : e->op == ExprOp::Exp ? "exp"
                                          : "sqrt";
            out += '(';
            print_node(e->lhs, out, 0, false);
            out += ')';
            break;
        case ExprOp::Pow:
            print_node(e->lhs, out, precedence(ExprOp::Pow) + 1, false);
            out += '^';
            out += std::to_string(e->exponent);
            break;
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
        case ExprOp::Div: {
            const char sym = e->op == ExprOp::Add   ? '+'
                             : e->op == ExprOp::Sub ? '-'
                             : e->op == ExprOp::Mul ? '*'
                                                    : '/';
            print_node(e->lhs, out, prec, false);
            out += sym;
            print_node(e->rhs, out, prec, true);
            break;
        }
    }
    if (parens) out += ')';
}

}  // namespace detail

inline Expr parse_expr(const std::string& text, int dim) {
    if (dim < 1) throw std::invalid_argument("chart dimension must be >= 1");
    detail::Parser p(text, dim);
    return Expr(p.parse(), dim);
}

inline std::string print_expr(const Expr& e) {
    std::string out;
    detail::print_node(e.root(), out, 0, false);
    return out;
}

// --- evaluation -------------------------------------------------------------

template <class D>
D eval_node(const ExprNode& e, std::span<const D> x) {
    switch (e.op) {
        case ExprOp::Const: return constant_like(x[0], e.value);
        case ExprOp::Var: return x[static_cast<std::size_t>(e.var)];
        case ExprOp::Neg: return -eval_node(*e.lhs, x);
        case ExprOp::Sin: return sin(eval_node(*e.lhs, x));
        case ExprOp::Cos: return cos(eval_node(*e.lhs, x));
        case ExprOp::Exp: return exp(eval_node(*e.lhs, x));
        case ExprOp::Sqrt: {
            D arg = eval_node(*e.lhs, x);
            if (leading(arg) < 0.0) {
                std::string t;
                detail::print_node(e.lhs, t, 0, false);
                throw DomainError("sqrt of negative value in subexpression: sqrt(" + t + ")");
            }
            return sqrt(arg);
        }
        case ExprOp::Add: return eval_node(*e.lhs, x) + eval_node(*e.rhs, x);
        case ExprOp::Sub: return eval_node(*e.lhs, x) - eval_node(*e.rhs, x);
        case ExprOp::Mul: return eval_node(*e.lhs, x) * eval_node(*e.rhs, x);
        case ExprOp::Div: {
            D num = eval_node(*e.lhs, x);
            D den = eval_node(*e.rhs, x);
            if (leading(den) == 0.0) {
                std::string t;
                detail::print_node(e.rhs, t, 0, false);
                throw DomainError("division by zero in subexpression: /(" + t + ")");
            }
            return num / den;
        }
        case ExprOp::Pow: {
            D base = eval_node(*e.lhs, x);
            if (e.exponent < 0 && leading(base) == 0.0) {
                std::string t;
                detail::print_node(e.lhs, t, 0, false);
                throw DomainError("zero base with negative exponent: (" + t + ")^" +
                                  std::to_string(e.exponent));
            }
            return pow_int(base, e.exponent);
        }
    }
    throw std::logic_error("unreachable expression op");
}

template <class D>
D eval(const Expr& e, std::span<const D> x) {
    if (static_cast<int>(x.size()) != e.dim())
        throw std::invalid_argument("point dimension does not match expression chart dimension");
    return eval_node<D>(*e.root(), x);
}

template <class D>
D eval(const Expr& e, const std::vector<D>& x) {
    return eval<D>(e, std::span<const D>(x));
}

// --- second-order jets ------------------------------------------------------

struct Jet2 {
    double value = 0.0;
    std::vector<double> grad;   // length n
    std::vector<double> hess;   // n*n, exactly symmetric (mirrored from one triangle)

    double h(int i, int j) const { return hess[static_cast<std::size_t>(i) * grad.size() + j]; }
};

inline Jet2 eval_jet2(const Expr& e, const std::vector<double>& p) {
    const std::size_t n = p.size();
    std::vector<D1> x1(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i].a = p[i];
        x1[i].b.assign(n, 0.0);
        x1[i].b[i] = 1.0;
    }
    std::vector<D2> x2 = seed(x1);
    D2 r = eval(e, x2);

    Jet2 j;
    j.value = r.a.a;
    j.grad.resize(n);
    j.hess.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) j.grad[i] = r.a.b[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i; k < n; ++k) {
            j.hess[i * n + k] = r.b[k].b[i];
            j.hess[k * n + i] = r.b[k].b[i];
        }
    return j;
}

}  // namespace grm
