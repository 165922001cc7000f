#ifndef PLX_SYSTEM_HPP
#define PLX_SYSTEM_HPP

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "plx/brackets.hpp"
#include "plx/domain.hpp"
#include "plx/plap.hpp"
#include "plx/problem_spec.hpp"

namespace plx {

class SystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluates every structural hypothesis of the coupled system on the
/// grid (sign pattern of the coupling exponents, exponent ranges,
/// dimension bounds) and detects cooperative vs competitive structure.
/// Throws on mixed structure. For 1D surrogate grids the dimensional
/// upper bound on p, q is waived with a logged warning.
StructureReport check_structure(const ProblemSpec& spec, const Grid& grid);

/// Pointwise clamp of z into [lower, upper]; requires lower <= upper.
Field truncate(const Field& z, const Field& lower, const Field& upper);

/// One application of the decoupled solution map for the cooperative
/// system: truncates (z1,z2) into the bracket, solves the two scalar
/// problems with frozen coupled RHS, returns (u, v).
std::pair<Field, Field> operator_T_coop(const ProblemSpec& spec, const Grid& grid,
                                        const Bracket& bracket, const Field& z1, const Field& z2,
                                        const SolverConfig& cfg,
                                        std::vector<std::string>* diagnostics = nullptr);

/// Smallest zeroth-order weight making the augmented competitive map
/// order-preserving: twice the worst nodal ratio of the coupling
/// derivative bound to the augmentation floor max{d^gamma, low^{p-1}}.
double rho_estimate(const ProblemSpec& spec, const Grid& grid, const Bracket& bracket);

/// Augmented competitive map: same as operator_T_coop but with the
/// monotone excess term rho*z2t*(max{A, |u|^{p-2}u} - A),
/// A = max{d^gamma1, z1t^{p-1}}, added to the operator; the term vanishes
/// identically at a fixed point, where A dominates u^{p-1}.
std::pair<Field, Field> operator_T_comp(const ProblemSpec& spec, const Grid& grid,
                                        const Bracket& bracket, const Field& z1, const Field& z2,
                                        double rho, const SolverConfig& cfg,
                                        std::vector<std::string>* diagnostics = nullptr);

struct FixedPointReport {
    int iterations = 0;
    std::vector<double> sup_changes;
    int bracket_violations = 0;
    double weak_residual_u = 0.0, weak_residual_v = 0.0;
    double growth_c_u = 0.0, growth_c_v = 0.0;  // fitted min of u/d, v/d on the strip
    double rho = 0.0;
    bool converged = false;
    std::string diagnostic;
};

/// Picard iteration of the solution map from the subsolution end of the
/// bracket. Verifies on success: bracket containment, weak residual of
/// the coupled system <= 1e-6, interior positivity, and positive fitted
/// boundary-growth constants.
std::tuple<Field, Field, FixedPointReport> fixed_point_solve(const ProblemSpec& spec,
                                                             const Grid& grid,
                                                             const Bracket& bracket,
                                                             const SolverConfig& cfg);

}  // namespace plx

#endif
