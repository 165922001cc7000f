#ifndef PLX_PLAP_HPP
#define PLX_PLAP_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plx/certificate.hpp"
#include "plx/domain.hpp"
#include "plx/quadrature.hpp"

namespace plx {

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Optional monotone zeroth-order term: adds
///   integral of coef(x) * Psi(u) dx,   Psi'(u) = max(threshold, |u|^{p-2} u)
/// to the energy (lumped nodal quadrature). With subtract_threshold the
/// derivative is max(threshold, |u|^{p-2}u) - threshold instead, i.e. the
/// excess over the floor; it vanishes identically wherever
/// |u|^{p-2}u <= threshold, which makes the augmented competitive
/// operator cancel its floor exactly at a fixed point. coef and
/// threshold must be nonnegative.
struct ZerothOrder {
    Field coef;
    Field threshold;
    bool subtract_threshold = false;
};

/// Dirichlet problem -div(|grad u|^{p(x)-2} grad u) [+ zeroth] = rhs, u=0
/// on the boundary. p must satisfy 1 < p on every node.
struct PlapProblem {
    const Grid* grid = nullptr;
    Field p;
    Rhs rhs;
    std::optional<ZerothOrder> zeroth;

    void validate() const;
};

struct SolverConfig {
    double eps_reg = 1e-8;   // gradient regularization in (|g|^2 + eps^2)^(p/2)
    double tol = 1e-10;      // sup norm of the energy gradient
    int max_iter = 500;
    double damping = 0.5;    // backtracking factor
    double armijo = 1e-4;    // sufficient-decrease constant
    unsigned seed = 0;       // for the randomized test-function set
};

struct SolveReport {
    int iterations = 0;
    double final_energy = 0.0;
    double grad_sup = 0.0;
    double weak_res = 0.0;
    double linf = 0.0;
    bool converged = false;
    bool energy_monotone = true;
    std::string diagnostic;
};

/// Regularized convex energy J(u) = int (1/p)(|grad u|^2 + eps^2)^(p/2)
/// - int rhs*u, with cell-midpoint gradients and singular-aware load.
double energy(const PlapProblem& prob, const Field& u, const SolverConfig& cfg);

/// Damped Newton minimization of the energy; gradient-descent fallback
/// when the Newton system cannot be factorized. The default initial
/// iterate is the p=2 solution of the same load.
std::pair<Field, SolveReport> solve_dirichlet(const PlapProblem& prob, const SolverConfig& cfg,
                                              const std::optional<Field>& init = {});

/// max over test fields of |a(u,phi) - F(phi)| / (1 + sup|grad phi|),
/// with the unregularized kernel |grad u|^{p-2} grad u.
double weak_residual(const PlapProblem& prob, const Field& u, const std::vector<Field>& tests);

/// Default test set: hats on a coarsened node lattice plus 5 random
/// smooth bumps (seeded).
std::vector<Field> default_test_fields(const Grid& grid, unsigned seed);

/// Weak comparison: rhs1 <= rhs2 (same grid, same p) implies u1 <= u2 up
/// to consistency slack 10*h.
BoundCertificate comparison_check(const PlapProblem& prob1, const PlapProblem& prob2,
                                  const SolverConfig& cfg);

/// Pointwise discrete -Delta_{p(x)} u at interior nodes (energy-gradient
/// divided by nodal volume); zero at boundary nodes.
Field apply_plap_operator(const Grid& grid, const Field& p, const Field& u);

}  // namespace plx

#endif
