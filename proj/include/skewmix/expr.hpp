#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "skewmix/common.hpp"
#include "skewmix/jet.hpp"

namespace skewmix {

// AST for branch expressions.  Grammar: numeric literals, `pi`, variable `x`,
// unary `-`, binary `+ - * / ^` (with `^` right-associative) and the
// functions sin, cos, exp, log.

enum class ExprKind {
    Number,
    Pi,
    Var,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Exp,
    Log,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double number = 0.0;  // Number only
    ExprPtr a, b;

    static ExprPtr num(double v) {
        return std::make_shared<Expr>(Expr{ExprKind::Number, v, nullptr, nullptr});
    }
    static ExprPtr make(ExprKind k, ExprPtr x = nullptr, ExprPtr y = nullptr) {
        return std::make_shared<Expr>(Expr{k, 0.0, std::move(x), std::move(y)});
    }
};

// ---- evaluation ------------------------------------------------------------

template <class T>
T eval_expr(const Expr& e, const T& x) {
    switch (e.kind) {
        case ExprKind::Number:
            if constexpr (std::is_same_v<T, Jet2>)
                return Jet2::constant(e.number);
            else
                return e.number;
        case ExprKind::Pi:
            if constexpr (std::is_same_v<T, Jet2>)
                return Jet2::constant(kPi);
            else
                return kPi;
        case ExprKind::Var:
            return x;
        case ExprKind::Neg:
            return -eval_expr(*e.a, x);
        case ExprKind::Add:
            return eval_expr(*e.a, x) + eval_expr(*e.b, x);
        case ExprKind::Sub:
            return eval_expr(*e.a, x) - eval_expr(*e.b, x);
        case ExprKind::Mul:
            return eval_expr(*e.a, x) * eval_expr(*e.b, x);
        case ExprKind::Div: {
            T den = eval_expr(*e.b, x);
            if constexpr (std::is_same_v<T, double>) {
                if (den == 0.0) throw EvalDomainError("division by zero");
                return eval_expr(*e.a, x) / den;
            } else {
                return eval_expr(*e.a, x) / den;
            }
        }
        case ExprKind::Pow: {
            if constexpr (std::is_same_v<T, double>) {
                double base = eval_expr(*e.a, x), ex = eval_expr(*e.b, x);
                if (base <= 0.0 && std::round(ex) != ex)
                    throw EvalDomainError("non-integer power of non-positive base");
                return std::pow(base, ex);
            } else {
                return pow(eval_expr(*e.a, x), eval_expr(*e.b, x));
            }
        }
        case ExprKind::Sin:
            if constexpr (std::is_same_v<T, double>)
                return std::sin(eval_expr(*e.a, x));
            else
                return sin(eval_expr(*e.a, x));
        case ExprKind::Cos:
            if constexpr (std::is_same_v<T, double>)
                return std::cos(eval_expr(*e.a, x));
            else
                return cos(eval_expr(*e.a, x));
        case ExprKind::Exp:
            if constexpr (std::is_same_v<T, double>)
                return std::exp(eval_expr(*e.a, x));
            else
                return exp(eval_expr(*e.a, x));
        case ExprKind::Log: {
            T v = eval_expr(*e.a, x);
            if constexpr (std::is_same_v<T, double>) {
                if (!(v > 0.0)) throw EvalDomainError("log of non-positive value");
                return std::log(v);
            } else {
                return log(v);
            }
        }
    }
    throw Error("unreachable expression kind");
}

inline double eval_value(const Expr& e, double x) { return eval_expr<double>(e, x); }

inline Jet2 eval_jet2(const Expr& e, double x) {
    return eval_expr<Jet2>(e, Jet2::variable(x));
}

// ---- parsing ---------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse() {
        if (src_.empty()) throw ParseError("empty expression", 0);
        ExprPtr e = sum();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr sum() {
        ExprPtr e = product();
        for (;;) {
            if (eat('+'))
                e = Expr::make(ExprKind::Add, e, product());
            else if (eat('-'))
                e = Expr::make(ExprKind::Sub, e, product());
            else
                return e;
        }
    }

    ExprPtr product() {
        ExprPtr e = unary();
        for (;;) {
            if (eat('*'))
                e = Expr::make(ExprKind::Mul, e, unary());
            else if (eat('/'))
                e = Expr::make(ExprKind::Div, e, unary());
            else
                return e;
        }
    }

    ExprPtr unary() {
        if (eat('-')) return Expr::make(ExprKind::Neg, unary());
        return power();
    }

    // right-associative: a^b^c == a^(b^c); exponent may carry a unary minus
    ExprPtr power() {
        ExprPtr base = atom();
        if (eat('^')) return Expr::make(ExprKind::Pow, base, unary());
        return base;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = sum();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        // exponent part
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        try {
            return Expr::num(std::stod(text));
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + text + "'", start);
        }
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        if (name == "x") return Expr::make(ExprKind::Var);
        if (name == "pi") return Expr::make(ExprKind::Pi);
        ExprKind k;
        if (name == "sin")
            k = ExprKind::Sin;
        else if (name == "cos")
            k = ExprKind::Cos;
        else if (name == "exp")
            k = ExprKind::Exp;
        else if (name == "log")
            k = ExprKind::Log;
        else
            throw ParseError("unknown identifier '" + name + "'", start);
        if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
        ExprPtr arg = sum();
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        return Expr::make(k, arg);
    }
};

inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub:
            return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
            return 2;
        case ExprKind::Neg:
            return 3;
        case ExprKind::Pow:
            return 4;
        default:
            return 5;  // atoms
    }
}

inline void print_expr(const Expr& e, std::string& out, int parent_prec, bool right_side) {
    int prec = precedence(e.kind);
    bool need_parens = prec < parent_prec || (prec == parent_prec && right_side);
    switch (e.kind) {
        case ExprKind::Number: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.17g", e.number);
            out += buf;
            return;
        }
        case ExprKind::Pi:
            out += "pi";
            return;
        case ExprKind::Var:
            out += "x";
            return;
        case ExprKind::Neg:
            if (need_parens) out += '(';
            out += '-';
            print_expr(*e.a, out, prec, true);
            if (need_parens) out += ')';
            return;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div:
        case ExprKind::Pow: {
            if (need_parens) out += '(';
            // ^ is right-associative, the rest left-associative
            bool ra = (e.kind == ExprKind::Pow);
            print_expr(*e.a, out, prec, ra);
            switch (e.kind) {
                case ExprKind::Add: out += " + "; break;
                case ExprKind::Sub: out += " - "; break;
                case ExprKind::Mul: out += "*"; break;
                case ExprKind::Div: out += "/"; break;
                case ExprKind::Pow: out += "^"; break;
                default: break;
            }
            print_expr(*e.b, out, prec, !ra);
            if (need_parens) out += ')';
            return;
        }
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
        case ExprKind::Log: {
            switch (e.kind) {
                case ExprKind::Sin: out += "sin("; break;
                case ExprKind::Cos: out += "cos("; break;
                case ExprKind::Exp: out += "exp("; break;
                case ExprKind::Log: out += "log("; break;
                default: break;
            }
            print_expr(*e.a, out, 0, false);
            out += ')';
            return;
        }
    }
}

}  // namespace detail

inline ExprPtr parse_expression(std::string_view source) {
    return detail::Parser(source).parse();
}

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print_expr(e, out, 0, false);
    return out;
}

inline bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == ExprKind::Number) return a.number == b.number;
    if (a.a && !expr_equal(*a.a, *b.a)) return false;
    if (a.b && !expr_equal(*a.b, *b.b)) return false;
    return true;
}

}  // namespace skewmix
