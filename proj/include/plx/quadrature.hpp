#ifndef PLX_QUADRATURE_HPP
#define PLX_QUADRATURE_HPP

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <vector>

#include "plx/domain.hpp"
#include "plx/expr.hpp"

namespace plx {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One piece of a right-hand side, active where d(x) in [d_min, d_max):
/// value = smooth(x) * d(x)^power(x). The smooth factor is nodal and
/// interpolated per cell; the optional power makes the piece singular at
/// the boundary and is treated by exact antiderivatives (1D) or graded
/// subdivision (2D).
struct RhsPiece {
    double d_min = 0.0;
    double d_max = std::numeric_limits<double>::infinity();
    Field smooth;
    std::optional<Field> power;
};

/// Piecewise right-hand side stored in factored (smooth x d^power) form.
struct Rhs {
    std::vector<RhsPiece> pieces;

    static Rhs plain(Field f);
    /// rhs = scale * base^gamma with base ~ d near the boundary: on the
    /// strip d < delta the distance power is pulled out analytically
    /// (smooth = scale*(base/d)^gamma, power = gamma), off the strip the
    /// piece is the plain nodal value scale*base^gamma.
    static Rhs singular_power(const Grid& g, const Field& base, const Field& gamma,
                              double scale, double delta);
    /// Factored form of given nodal values: on the strip d < delta the
    /// stated distance power is divided out of the values and reattached
    /// analytically; off the strip the values are used as-is.
    static Rhs factored(const Grid& g, const Field& values, const Field& power, double delta);

    /// Nodal evaluation (boundary nodes are set to 0; singular pieces
    /// would be infinite there and never enter Dirichlet rows).
    Field eval_at_nodes(const Grid& g) const;

    double power_inf(const Grid& g) const;  // +inf when no piece has a power
};

/// integral of field * d^weight over the domain. Exact for affine fields
/// without weight on interval/rectangle; boundary cells of weighted
/// integrands use the exact antiderivative of the distance power (1D) or
/// graded sub-cells (2D). Throws when inf(weight) <= -1.
double integrate(const Field& field, const std::optional<Field>& weight_exponent = {});
double integrate(const Field& field, const ExprField& weight_exponent);

/// Load vector b_i = integral of rhs * hat_i over the domain, with cells
/// split at piece boundaries and the distance-function kink.
Eigen::VectorXd assemble_load(const Grid& g, const Rhs& rhs);

/// Lumped nodal volumes (integral of hat_i).
Eigen::VectorXd nodal_volumes(const Grid& g);

}  // namespace plx

#endif
