#pragma once

// Scalar expression language for manifest-defined immersions: recursive-descent
// parser and order-2 jet (value/gradient/Hessian) evaluation.

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "slantlab/errors.hpp"

namespace slantlab {

// Order-2 truncated Taylor data of a scalar function of d parameters.
// The Hessian is stored fully and is symmetric by construction.
struct Jet2 {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;

    explicit Jet2(int d) : grad(Eigen::VectorXd::Zero(d)), hess(Eigen::MatrixXd::Zero(d, d)) {}
    static Jet2 constant(int d, double c) {
        Jet2 j(d);
        j.value = c;
        return j;
    }
    static Jet2 param(int d, int i, double x) {
        Jet2 j(d);
        j.value = x;
        j.grad(i) = 1.0;
        return j;
    }
    int dim() const { return static_cast<int>(grad.size()); }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r(a.dim());
    r.value = a.value + b.value;
    r.grad = a.grad + b.grad;
    r.hess = a.hess + b.hess;
    return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r(a.dim());
    r.value = a.value - b.value;
    r.grad = a.grad - b.grad;
    r.hess = a.hess - b.hess;
    return r;
}
inline Jet2 operator-(const Jet2& a) {
    Jet2 r(a.dim());
    r.value = -a.value;
    r.grad = -a.grad;
    r.hess = -a.hess;
    return r;
}
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(a.dim());
    r.value = a.value * b.value;
    r.grad = a.grad * b.value + b.grad * a.value;
    r.hess = a.hess * b.value + b.hess * a.value + a.grad * b.grad.transpose() +
             b.grad * a.grad.transpose();
    return r;
}

// chain rule for f(u): needs f(u), f'(u), f''(u)
inline Jet2 jet_chain(const Jet2& u, double f, double fp, double fpp) {
    Jet2 r(u.dim());
    r.value = f;
    r.grad = fp * u.grad;
    r.hess = fp * u.hess + fpp * (u.grad * u.grad.transpose());
    return r;
}

enum class ExprKind { Number, Param, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Tan, Sqrt, Exp, Log, Abs };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    double number = 0.0;       // Number
    int param = -1;            // Param
    Func fn = Func::Sin;       // Call
    ExprPtr lhs, rhs;          // binary / Neg(lhs) / Call(lhs)
    double exponent = 0.0;     // Pow: folded constant exponent
    std::size_t offset = 0;    // source byte offset (for diagnostics)
};

// Immutable parsed expression over a fixed parameter list.
class Expr {
  public:
    Expr() = default;
    Expr(ExprPtr root, std::vector<std::string> params, std::string source)
        : root_(std::move(root)), params_(std::move(params)), source_(std::move(source)) {}

    bool valid() const { return root_ != nullptr; }
    int param_count() const { return static_cast<int>(params_.size()); }
    const std::vector<std::string>& params() const { return params_; }
    const std::string& source() const { return source_; }
    const ExprPtr& root() const { return root_; }

    double eval(const Eigen::VectorXd& p) const;
    Jet2 eval_jet2(const Eigen::VectorXd& p) const;
    std::string pretty() const;

  private:
    ExprPtr root_;
    std::vector<std::string> params_;
    std::string source_;
};

namespace detail {

struct Parser {
    const std::string& src;
    const std::vector<std::string>& params;
    std::size_t pos = 0;

    Parser(const std::string& s, const std::vector<std::string>& ps) : src(s), params(ps) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    ExprPtr make(ExprKind k, ExprPtr a, ExprPtr b, std::size_t off) {
        auto n = std::make_shared<ExprNode>();
        n->kind = k;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        n->offset = off;
        return n;
    }

    ExprPtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            std::size_t off = pos;
            if (eat('+'))
                lhs = make(ExprKind::Add, lhs, parse_term(), off);
            else if (eat('-'))
                lhs = make(ExprKind::Sub, lhs, parse_term(), off);
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            std::size_t off = pos;
            if (eat('*'))
                lhs = make(ExprKind::Mul, lhs, parse_unary(), off);
            else if (eat('/'))
                lhs = make(ExprKind::Div, lhs, parse_unary(), off);
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        std::size_t off = pos;
        if (eat('-')) {
            auto n = make(ExprKind::Neg, parse_unary(), nullptr, off);
            return n;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        auto base = parse_primary();
        std::size_t off = pos;
        if (eat('^')) {
            auto expo = parse_unary();  // right-associative, unary minus allowed in exponent
            if (!is_constant(expo))
                throw SyntaxError(off, "exponent must be a constant expression");
            auto n = make(ExprKind::Pow, base, expo, off);
            n = std::make_shared<ExprNode>(*n);
            const_cast<ExprNode&>(*n).exponent = fold_constant(expo);
            return n;
        }
        return base;
    }

    static bool is_constant(const ExprPtr& n) {
        if (!n) return true;
        if (n->kind == ExprKind::Param) return false;
        return is_constant(n->lhs) && is_constant(n->rhs);
    }

    static double fold_constant(const ExprPtr& n);

    ExprPtr parse_primary() {
        skip_ws();
        std::size_t off = pos;
        if (pos >= src.size()) throw SyntaxError(off, "unexpected end of input");
        char c = src[pos];
        if (c == '(') {
            ++pos;
            auto inner = parse_expr();
            if (!eat(')')) throw SyntaxError(pos, "expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw SyntaxError(off, std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        std::size_t off = pos;
        std::size_t end = pos;
        while (end < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[end])) || src[end] == '.'))
            ++end;
        // exponent suffix like 1e-3
        if (end < src.size() && (src[end] == 'e' || src[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src.size() && (src[e] == '+' || src[e] == '-')) ++e;
            if (e < src.size() && std::isdigit(static_cast<unsigned char>(src[e]))) {
                ++e;
                while (e < src.size() && std::isdigit(static_cast<unsigned char>(src[e]))) ++e;
                end = e;
            }
        }
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(src.substr(pos, end - pos), &used);
        } catch (const std::exception&) {
            throw SyntaxError(off, "malformed number");
        }
        pos += used;
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Number;
        n->number = v;
        n->offset = off;
        return n;
    }

    ExprPtr parse_ident() {
        std::size_t off = pos;
        std::size_t end = pos;
        while (end < src.size() && (std::isalnum(static_cast<unsigned char>(src[end])) ||
                                    src[end] == '_'))
            ++end;
        std::string name = src.substr(pos, end - pos);
        pos = end;
        skip_ws();
        if (pos < src.size() && src[pos] == '(') {
            Func f;
            if (name == "sin")
                f = Func::Sin;
            else if (name == "cos")
                f = Func::Cos;
            else if (name == "tan")
                f = Func::Tan;
            else if (name == "sqrt")
                f = Func::Sqrt;
            else if (name == "exp")
                f = Func::Exp;
            else if (name == "log")
                f = Func::Log;
            else if (name == "abs")
                f = Func::Abs;
            else
                throw UnknownIdentifier(name, off);
            ++pos;  // '('
            auto arg = parse_expr();
            if (!eat(')')) throw SyntaxError(pos, "expected ')' after function argument");
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprKind::Call;
            n->fn = f;
            n->lhs = arg;
            n->offset = off;
            return n;
        }
        if (name == "pi" || name == "e") {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprKind::Number;
            n->number = (name == "pi") ? M_PI : M_E;
            n->offset = off;
            return n;
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i] == name) {
                auto n = std::make_shared<ExprNode>();
                n->kind = ExprKind::Param;
                n->param = static_cast<int>(i);
                n->offset = off;
                return n;
            }
        }
        throw UnknownIdentifier(name, off);
    }
};

inline double Parser::fold_constant(const ExprPtr& n) {
    switch (n->kind) {
        case ExprKind::Number: return n->number;
        case ExprKind::Add: return fold_constant(n->lhs) + fold_constant(n->rhs);
        case ExprKind::Sub: return fold_constant(n->lhs) - fold_constant(n->rhs);
        case ExprKind::Mul: return fold_constant(n->lhs) * fold_constant(n->rhs);
        case ExprKind::Div: return fold_constant(n->lhs) / fold_constant(n->rhs);
        case ExprKind::Pow: return std::pow(fold_constant(n->lhs), n->exponent);
        case ExprKind::Neg: return -fold_constant(n->lhs);
        case ExprKind::Call: {
            double u = fold_constant(n->lhs);
            switch (n->fn) {
                case Func::Sin: return std::sin(u);
                case Func::Cos: return std::cos(u);
                case Func::Tan: return std::tan(u);
                case Func::Sqrt: return std::sqrt(u);
                case Func::Exp: return std::exp(u);
                case Func::Log: return std::log(u);
                case Func::Abs: return std::fabs(u);
            }
            return 0.0;
        }
        case ExprKind::Param: break;
    }
    throw SyntaxError(n->offset, "exponent must be a constant expression");
}

inline std::string pretty_node(const ExprPtr& n, const std::vector<std::string>& params) {
    switch (n->kind) {
        case ExprKind::Number: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", n->number);
            return buf;
        }
        case ExprKind::Param: return params[static_cast<std::size_t>(n->param)];
        case ExprKind::Add:
            return "(" + pretty_node(n->lhs, params) + " + " + pretty_node(n->rhs, params) + ")";
        case ExprKind::Sub:
            return "(" + pretty_node(n->lhs, params) + " - " + pretty_node(n->rhs, params) + ")";
        case ExprKind::Mul:
            return "(" + pretty_node(n->lhs, params) + " * " + pretty_node(n->rhs, params) + ")";
        case ExprKind::Div:
            return "(" + pretty_node(n->lhs, params) + " / " + pretty_node(n->rhs, params) + ")";
        case ExprKind::Pow:
            return "(" + pretty_node(n->lhs, params) + " ^ " + pretty_node(n->rhs, params) + ")";
        case ExprKind::Neg: return "(-" + pretty_node(n->lhs, params) + ")";
        case ExprKind::Call: {
            static const char* names[] = {"sin", "cos", "tan", "sqrt", "exp", "log", "abs"};
            return std::string(names[static_cast<int>(n->fn)]) + "(" +
                   pretty_node(n->lhs, params) + ")";
        }
    }
    return "";
}

inline double eval_node(const ExprNode& n, const Eigen::VectorXd& p,
                        const std::vector<std::string>& params) {
    switch (n.kind) {
        case ExprKind::Number: return n.number;
        case ExprKind::Param: return p(n.param);
        case ExprKind::Add: return eval_node(*n.lhs, p, params) + eval_node(*n.rhs, p, params);
        case ExprKind::Sub: return eval_node(*n.lhs, p, params) - eval_node(*n.rhs, p, params);
        case ExprKind::Mul: return eval_node(*n.lhs, p, params) * eval_node(*n.rhs, p, params);
        case ExprKind::Div: {
            double a = eval_node(*n.lhs, p, params), b = eval_node(*n.rhs, p, params);
            if (b == 0.0) throw DomainError("division by zero", pretty_node(n.rhs, params));
            return a / b;
        }
        case ExprKind::Pow: {
            double base = eval_node(*n.lhs, p, params);
            double k = n.exponent;
            if (k != std::nearbyint(k) && base <= 0.0)
                throw DomainError("non-integer power of non-positive base",
                                  pretty_node(n.lhs, params));
            if (base == 0.0 && k < 0.0)
                throw DomainError("negative power of zero", pretty_node(n.lhs, params));
            return std::pow(base, k);
        }
        case ExprKind::Neg: return -eval_node(*n.lhs, p, params);
        case ExprKind::Call: {
            double u = eval_node(*n.lhs, p, params);
            switch (n.fn) {
                case Func::Sin: return std::sin(u);
                case Func::Cos: return std::cos(u);
                case Func::Tan: {
                    if (std::fabs(std::cos(u)) < 1e-300)
                        throw DomainError("tan at a pole", pretty_node(n.lhs, params));
                    return std::tan(u);
                }
                case Func::Sqrt: {
                    if (u < 0.0) throw DomainError("sqrt of negative", pretty_node(n.lhs, params));
                    return std::sqrt(u);
                }
                case Func::Exp: return std::exp(u);
                case Func::Log: {
                    if (u <= 0.0)
                        throw DomainError("log of non-positive", pretty_node(n.lhs, params));
                    return std::log(u);
                }
                case Func::Abs: return std::fabs(u);
            }
            return 0.0;
        }
    }
    return 0.0;
}

inline Jet2 jet_node(const ExprNode& n, const Eigen::VectorXd& p,
                     const std::vector<std::string>& params) {
    const int d = static_cast<int>(p.size());
    switch (n.kind) {
        case ExprKind::Number: return Jet2::constant(d, n.number);
        case ExprKind::Param: return Jet2::param(d, n.param, p(n.param));
        case ExprKind::Add: return jet_node(*n.lhs, p, params) + jet_node(*n.rhs, p, params);
        case ExprKind::Sub: return jet_node(*n.lhs, p, params) - jet_node(*n.rhs, p, params);
        case ExprKind::Mul: return jet_node(*n.lhs, p, params) * jet_node(*n.rhs, p, params);
        case ExprKind::Div: {
            Jet2 a = jet_node(*n.lhs, p, params);
            Jet2 b = jet_node(*n.rhs, p, params);
            if (b.value == 0.0) throw DomainError("division by zero", pretty_node(n.rhs, params));
            // reciprocal jet of b, then product
            double iv = 1.0 / b.value;
            Jet2 rb = jet_chain(b, iv, -iv * iv, 2.0 * iv * iv * iv);
            return a * rb;
        }
        case ExprKind::Pow: {
            Jet2 base = jet_node(*n.lhs, p, params);
            double k = n.exponent;
            bool integer = (k == std::nearbyint(k));
            if (!integer && base.value <= 0.0)
                throw DomainError("non-integer power of non-positive base",
                                  pretty_node(n.lhs, params));
            if (base.value == 0.0 && k < 2.0 && k != 0.0 && k != 1.0)
                throw DomainError("power with singular derivative at zero base",
                                  pretty_node(n.lhs, params));
            double f = std::pow(base.value, k);
            double fp = (k == 0.0) ? 0.0 : k * std::pow(base.value, k - 1.0);
            double fpp = (k == 0.0 || k == 1.0) ? 0.0
                                                : k * (k - 1.0) * std::pow(base.value, k - 2.0);
            return jet_chain(base, f, fp, fpp);
        }
        case ExprKind::Neg: return -jet_node(*n.lhs, p, params);
        case ExprKind::Call: {
            Jet2 u = jet_node(*n.lhs, p, params);
            double v = u.value;
            switch (n.fn) {
                case Func::Sin: return jet_chain(u, std::sin(v), std::cos(v), -std::sin(v));
                case Func::Cos: return jet_chain(u, std::cos(v), -std::sin(v), -std::cos(v));
                case Func::Tan: {
                    double c = std::cos(v);
                    if (std::fabs(c) < 1e-300)
                        throw DomainError("tan at a pole", pretty_node(n.lhs, params));
                    double t = std::tan(v), s2 = 1.0 / (c * c);
                    return jet_chain(u, t, s2, 2.0 * t * s2);
                }
                case Func::Sqrt: {
                    if (v < 0.0) throw DomainError("sqrt of negative", pretty_node(n.lhs, params));
                    if (v == 0.0)
                        throw DomainError("sqrt derivative singular at zero",
                                          pretty_node(n.lhs, params));
                    double s = std::sqrt(v);
                    return jet_chain(u, s, 0.5 / s, -0.25 / (s * v));
                }
                case Func::Exp: {
                    double ev = std::exp(v);
                    return jet_chain(u, ev, ev, ev);
                }
                case Func::Log: {
                    if (v <= 0.0)
                        throw DomainError("log of non-positive", pretty_node(n.lhs, params));
                    return jet_chain(u, std::log(v), 1.0 / v, -1.0 / (v * v));
                }
                case Func::Abs: {
                    double sg = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                    return jet_chain(u, std::fabs(v), sg, 0.0);
                }
            }
            return Jet2::constant(d, 0.0);
        }
    }
    return Jet2::constant(d, 0.0);
}

}  // namespace detail

inline Expr parse(const std::string& source, const std::vector<std::string>& params) {
    detail::Parser p(source, params);
    auto root = p.parse_expr();
    p.skip_ws();
    if (p.pos != source.size()) throw SyntaxError(p.pos, "trailing input");
    return Expr(root, params, source);
}

inline double Expr::eval(const Eigen::VectorXd& p) const {
    return detail::eval_node(*root_, p, params_);
}
inline Jet2 Expr::eval_jet2(const Eigen::VectorXd& p) const {
    return detail::jet_node(*root_, p, params_);
}
inline std::string Expr::pretty() const { return detail::pretty_node(root_, params_); }

// Structural equality, used by the parser round-trip property test.
inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Number: return a->number == b->number;
        case ExprKind::Param: return a->param == b->param;
        case ExprKind::Call:
            if (a->fn != b->fn) return false;
            return structurally_equal(a->lhs, b->lhs);
        case ExprKind::Pow:
            if (a->exponent != b->exponent) return false;
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
        case ExprKind::Neg: return structurally_equal(a->lhs, b->lhs);
        default:
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
    }
}

}  // namespace slantlab
