#include "plx/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "plx/domain.hpp"

namespace plx {
namespace detail {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Abs, Min, Max };

struct ExprNode {
    enum class Kind { Const, Var, Unary, Binary } kind;
    double value = 0.0;     // Const
    char var = 'x';         // Var: 'x', 'y', or 'd'
    Op op = Op::Add;
    std::shared_ptr<const ExprNode> lhs, rhs;
};

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Const;
    n->value = v;
    return n;
}

NodePtr make_var(char c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Var;
    n->var = c;
    return n;
}

NodePtr make_unary(Op op, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->op = op;
    n->lhs = std::move(a);
    return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr parse() {
        auto e = parse_sum();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        auto e = parse_product();
        for (;;) {
            if (accept('+'))
                e = make_binary(Op::Add, e, parse_product());
            else if (accept('-'))
                e = make_binary(Op::Sub, e, parse_product());
            else
                return e;
        }
    }

    NodePtr parse_product() {
        auto e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = make_binary(Op::Mul, e, parse_unary());
            else if (accept('/'))
                e = make_binary(Op::Div, e, parse_unary());
            else
                return e;
        }
    }

    // Unary minus binds looser than ^, so -2^2 parses as -(2^2).
    NodePtr parse_unary() {
        if (accept('-'))
            return make_unary(Op::Neg, parse_unary());
        if (accept('+'))
            return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_atom();
        if (accept('^'))
            return make_binary(Op::Pow, base, parse_unary());  // right-associative
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        std::size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(src_.substr(start), &consumed);
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
        pos_ = start + consumed;
        return make_const(v);
    }

    NodePtr parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "x") return make_var('x');
        if (name == "y") return make_var('y');
        if (name == "d") return make_var('d');
        if (name == "pi") return make_const(M_PI);

        Op op;
        int arity = 1;
        if (name == "sin") op = Op::Sin;
        else if (name == "cos") op = Op::Cos;
        else if (name == "exp") op = Op::Exp;
        else if (name == "log") op = Op::Log;
        else if (name == "abs") op = Op::Abs;
        else if (name == "min") { op = Op::Min; arity = 2; }
        else if (name == "max") { op = Op::Max; arity = 2; }
        else throw ParseError("unknown identifier '" + name + "'", start);

        expect('(');
        auto a = parse_sum();
        if (arity == 2) {
            expect(',');
            auto b = parse_sum();
            expect(')');
            return make_binary(op, a, b);
        }
        expect(')');
        return make_unary(op, a);
    }
};

double eval_node(const ExprNode& n, const EvalPoint& pt) {
    switch (n.kind) {
        case ExprNode::Kind::Const:
            return n.value;
        case ExprNode::Kind::Var:
            return n.var == 'x' ? pt.x : (n.var == 'y' ? pt.y : pt.d);
        case ExprNode::Kind::Unary: {
            double a = eval_node(*n.lhs, pt);
            switch (n.op) {
                case Op::Neg: return -a;
                case Op::Sin: return std::sin(a);
                case Op::Cos: return std::cos(a);
                case Op::Exp: return std::exp(a);
                case Op::Log:
                    if (a <= 0.0) throw EvalError("log of nonpositive value");
                    return std::log(a);
                case Op::Abs: return std::abs(a);
                default: break;
            }
            break;
        }
        case ExprNode::Kind::Binary: {
            double a = eval_node(*n.lhs, pt);
            double b = eval_node(*n.rhs, pt);
            switch (n.op) {
                case Op::Add: return a + b;
                case Op::Sub: return a - b;
                case Op::Mul: return a * b;
                case Op::Div:
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
                case Op::Pow: {
                    if (a < 0.0 && b != std::floor(b))
                        throw EvalError("fractional power of negative base");
                    if (a == 0.0 && b < 0.0)
                        throw EvalError("negative power of zero");
                    return std::pow(a, b);
                }
                case Op::Min: return std::min(a, b);
                case Op::Max: return std::max(a, b);
                default: break;
            }
            break;
        }
    }
    throw EvalError("malformed expression tree");
}

bool uses_y_node(const ExprNode& n) {
    if (n.kind == ExprNode::Kind::Var) return n.var == 'y';
    bool u = false;
    if (n.lhs) u = u || uses_y_node(*n.lhs);
    if (n.rhs) u = u || uses_y_node(*n.rhs);
    return u;
}

void print_node(const ExprNode& n, std::ostream& os) {
    switch (n.kind) {
        case ExprNode::Kind::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            std::string s = tmp.str();
            if (n.value < 0)
                os << "(" << s << ")";
            else
                os << s;
            return;
        }
        case ExprNode::Kind::Var:
            os << n.var;
            return;
        case ExprNode::Kind::Unary:
            switch (n.op) {
                case Op::Neg: os << "(-"; print_node(*n.lhs, os); os << ")"; return;
                case Op::Sin: os << "sin("; break;
                case Op::Cos: os << "cos("; break;
                case Op::Exp: os << "exp("; break;
                case Op::Log: os << "log("; break;
                case Op::Abs: os << "abs("; break;
                default: break;
            }
            print_node(*n.lhs, os);
            os << ")";
            return;
        case ExprNode::Kind::Binary: {
            const char* fn = nullptr;
            if (n.op == Op::Min) fn = "min";
            if (n.op == Op::Max) fn = "max";
            if (fn) {
                os << fn << "(";
                print_node(*n.lhs, os);
                os << ", ";
                print_node(*n.rhs, os);
                os << ")";
                return;
            }
            const char* sym = n.op == Op::Add ? "+" : n.op == Op::Sub ? "-"
                           : n.op == Op::Mul ? "*" : n.op == Op::Div ? "/" : "^";
            os << "(";
            print_node(*n.lhs, os);
            os << " " << sym << " ";
            print_node(*n.rhs, os);
            os << ")";
            return;
        }
    }
}

}  // namespace detail

ExprField ExprField::parse(const std::string& source) {
    detail::Parser parser(source);
    ExprField e;
    e.ast_ = parser.parse();
    e.source_ = source;
    return e;
}

ExprField ExprField::constant(double value) {
    ExprField e;
    e.ast_ = detail::make_const(value);
    std::ostringstream os;
    os.precision(17);
    os << value;
    e.source_ = os.str();
    return e;
}

double ExprField::eval(const EvalPoint& pt) const {
    if (!ast_) throw EvalError("evaluating an empty expression");
    double v = detail::eval_node(*ast_, pt);
    if (!std::isfinite(v)) throw EvalError("non-finite value in expression '" + source_ + "'");
    return v;
}

std::string ExprField::print() const {
    if (!ast_) return "";
    std::ostringstream os;
    detail::print_node(*ast_, os);
    return os.str();
}

bool ExprField::uses_y() const { return ast_ && detail::uses_y_node(*ast_); }

Field eval_on_grid(const ExprField& e, const Grid& grid) {
    if (e.uses_y() && grid.dim() == 1)
        throw EvalError("expression uses 'y' on a 1D grid");
    Field f(grid);
    for (int k = 0; k < grid.node_count(); ++k) {
        EvalPoint pt{grid.node_x[k], grid.dim() == 2 ? grid.node_y[k] : 0.0, grid.dist[k]};
        try {
            f[k] = e.eval(pt);
        } catch (const EvalError& err) {
            throw EvalError(std::string(err.what()) + " at node " + std::to_string(k));
        }
    }
    return f;
}

RangeSummary range_on_grid(const ExprField& e, const Grid& grid, bool interior_only) {
    Field f = eval_on_grid(e, grid);
    RangeSummary r;
    bool first = true;
    for (int k = 0; k < grid.node_count(); ++k) {
        if (interior_only && !grid.is_interior(k)) continue;
        if (first || f[k] < r.inf) { r.inf = f[k]; r.argmin = k; }
        if (first || f[k] > r.sup) { r.sup = f[k]; r.argmax = k; }
        first = false;
    }
    if (first) throw EvalError("range_on_grid: no nodes selected");

    // Probe on a 4x finer grid to guard against aliasing of oscillatory
    // exponents; nodal checks elsewhere only need modest accuracy.
    if (!interior_only) {
        int n_fine = 4 * (std::max(grid.nx, grid.ny) - 1) + 1;
        Grid fine = build_grid(grid.domain, n_fine);
        Field g = eval_on_grid(e, fine);
        double fine_inf = g.values.minCoeff();
        double fine_sup = g.values.maxCoeff();
        if (std::abs(fine_inf - r.inf) > 1e-3 || std::abs(fine_sup - r.sup) > 1e-3)
            r.aliasing_warning = true;
    }
    return r;
}

}  // namespace plx
