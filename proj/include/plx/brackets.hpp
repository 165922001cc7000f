#ifndef PLX_BRACKETS_HPP
#define PLX_BRACKETS_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "plx/certificate.hpp"
#include "plx/domain.hpp"
#include "plx/plap.hpp"
#include "plx/problem_spec.hpp"
#include "plx/quadrature.hpp"

namespace plx {

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ordered sub/supersolution pair for the coupled system, with the
/// certificates produced while constructing it. (u_low, v_low) is the
/// subsolution end, (u_high, v_high) the supersolution end.
struct Bracket {
    Field u_low, v_low, u_high, v_high;
    double lambda = 0.0;
    double sigma = 0.0;
    std::optional<double> sigma_bar;
    double delta = 0.0;
    std::vector<BoundCertificate> certificates;

    bool all_pass() const { return all_satisfied(certificates); }
};

/// Explicit barrier: w = d on the strip d < delta, then the wedge
/// integral delta + int_delta^{min(d,2delta)} ((2delta-t)/delta)^{2/(pm-1)} dt
/// (pm = inf p), constant for d >= 2delta. Nondecreasing in d.
Field wedge_barrier(const Grid& grid, const Field& p, double delta);

/// Growth constant of the u <= C * lambda^{1/(pm-1)} bound, fitted once
/// per run at the smallest lambda and reused at larger ones.
struct GrowthFit {
    bool fitted = false;
    double C = 0.0;
};

struct ScalarResult {
    Field u;
    std::vector<BoundCertificate> certificates;
    int iterations = 0;
    bool converged = false;

    bool all_pass() const { return converged && all_satisfied(certificates); }
};

/// Solves -Lap_{p(x)} u = lambda * u^{gamma(x)} (gamma in (-1,0)) by the
/// floored fixed-point iteration u_{k+1} = solve(lambda*max(u_k, w)^gamma)
/// with w = wedge_barrier as floor and initial iterate. Certifies the floor and
/// both sides of the min{delta,d} <= u <= C*lambda^{1/(pm-1)} envelope.
ScalarResult solve_singular_scalar(const Grid& grid, const Field& p, const ExprField& gamma,
                                   double lambda, double delta, const SolverConfig& cfg,
                                   GrowthFit* fit = nullptr);

/// Compares the solution u of -Lap_{p(x)} u = h with the solution u_eps of
/// the problem whose RHS is swapped to h_tilde on the strip d < eps;
/// certifies u_eps >= u/2 - 10*h_mesh pointwise.
BoundCertificate perturbed_half_bound_check(const Grid& grid, const Field& p, const Rhs& h,
                                            const Rhs& h_tilde, double eps,
                                            const SolverConfig& cfg);

/// Largest strip width in [eps_lo, eps_hi] for which the half-bound
/// certificate still passes (bisection; requires pass at eps_lo and fail
/// at eps_hi).
double perturbed_half_bound_crossover(const Grid& grid, const Field& p, const Rhs& h,
                                      const Rhs& h_tilde, double eps_lo, double eps_hi,
                                      const SolverConfig& cfg);

/// max{(pm-1)/(pm-1-a2p), (qm-1)/(qm-1-b1p)}; callers choose the
/// supersolution growth exponent strictly above this.
double sigma_bar_lower_bound(double p_minus, double q_minus, double alpha2_plus,
                             double beta1_plus);

Bracket cooperative_bracket(const ProblemSpec& spec, const Grid& grid, const SolverConfig& cfg);
Bracket competitive_bracket(const ProblemSpec& spec, const Grid& grid, const SolverConfig& cfg);

using BracketBuilder =
    std::function<Bracket(const ProblemSpec&, const Grid&, const SolverConfig&)>;

/// Doubles lambda from lambda0 until every certificate of the built
/// bracket passes (at most 30 doublings).
std::pair<double, Bracket> tune_lambda(const BracketBuilder& builder, const ProblemSpec& spec,
                                       const Grid& grid, const SolverConfig& cfg, double lambda0);

/// Fitted distance-growth exponent of u on the strip d < delta
/// (log-log least squares of u against d over interior strip nodes).
double fit_distance_exponent(const Grid& grid, const Field& u, double delta);

}  // namespace plx

#endif
