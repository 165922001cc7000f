#ifndef PLX_EXPR_HPP
#define PLX_EXPR_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plx {

class Grid;
class Field;

/// Error raised by the expression parser; `offset` is the byte position
/// in the source string where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point at which an expression is evaluated: coordinates plus the
/// distance-to-boundary value d.
struct EvalPoint {
    double x = 0.0;
    double y = 0.0;
    double d = 0.0;
};

namespace detail {
struct ExprNode;
}

/// A parsed arithmetic expression over the variables {x, y, d}.
/// Supports + - * / ^ (right-associative), unary minus, parentheses,
/// the functions sin, cos, exp, log, abs, min, max, and the constant pi.
/// Immutable and shareable; evaluation is pure.
class ExprField {
public:
    ExprField() = default;

    static ExprField parse(const std::string& source);
    static ExprField constant(double value);

    bool valid() const { return static_cast<bool>(ast_); }

    /// Evaluates at a single point. Throws EvalError on non-finite results
    /// (division by zero, log of a nonpositive value, fractional power of
    /// a negative base).
    double eval(const EvalPoint& pt) const;

    /// Prints the ast back to text; parse(print()) evaluates identically.
    std::string print() const;

    const std::string& source() const { return source_; }

    bool uses_y() const;

private:
    std::shared_ptr<const detail::ExprNode> ast_;
    std::string source_;
};

/// Grid-sampled range of an expression, with the locations where the
/// extrema are attained. `aliasing_warning` is set when a 4x finer probe
/// grid disagrees with the nodal inf/sup by more than 1e-3.
struct RangeSummary {
    double inf = 0.0;
    double sup = 0.0;
    int argmin = -1;
    int argmax = -1;
    bool aliasing_warning = false;
};

Field eval_on_grid(const ExprField& e, const Grid& grid);
RangeSummary range_on_grid(const ExprField& e, const Grid& grid, bool interior_only = false);

}  // namespace plx

#endif
