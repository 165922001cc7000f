#include "plx/system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace plx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_pow(double base, double ex) { return std::pow(std::max(base, 1e-12), ex); }

struct SpecFields {
    Field p, q, a1, a2, b1, b2;
};

SpecFields eval_spec(const ProblemSpec& spec, const Grid& grid) {
    return {eval_on_grid(spec.p, grid),      eval_on_grid(spec.q, grid),
            eval_on_grid(spec.alpha1, grid), eval_on_grid(spec.alpha2, grid),
            eval_on_grid(spec.beta1, grid),  eval_on_grid(spec.beta2, grid)};
}

// lambda * z1^ea * z2^eb as a quadrature-ready RHS: singular behaviour
// near the boundary is carried by the d^(ea+eb) factor (clipped to
// nonpositive exponents) on the strip.
Rhs coupled_rhs(const Grid& grid, double lambda, const Field& z1, const Field& ea,
                const Field& z2, const Field& eb, double delta) {
    Field values(grid), power(grid);
    for (int k = 0; k < grid.node_count(); ++k) {
        power[k] = std::min(ea[k] + eb[k], 0.0);
        if (!grid.is_interior(k)) continue;
        values[k] = lambda * safe_pow(z1[k], ea[k]) * safe_pow(z2[k], eb[k]);
    }
    return Rhs::factored(grid, values, power, delta);
}

// Validates that the strip values of the coupled RHS do not exceed the
// envelope rate fitted on the bulk by more than 50%.
void envelope_check(const Grid& grid, const Rhs& rhs, double delta, const char* label,
                    std::vector<std::string>* diagnostics) {
    if (!diagnostics) return;
    Field vals = rhs.eval_at_nodes(grid);
    const Field& power = *rhs.pieces[0].power;
    double k1 = 0.0;
    for (int k : grid.interior_nodes())
        if (grid.dist[k] >= delta)
            k1 = std::max(k1, std::abs(vals[k]) / std::pow(grid.dist[k], power[k]));
    for (int k : grid.interior_nodes()) {
        double d = grid.dist[k];
        if (d >= delta) continue;
        double cap = 1.5 * k1 * std::pow(d, power[k]);
        if (std::abs(vals[k]) > cap + 1e-12) {
            std::ostringstream os;
            os << label << ": strip RHS exceeds fitted envelope at node " << k << " ("
               << vals[k] << " vs cap " << cap << ")";
            diagnostics->push_back(os.str());
            return;
        }
    }
}

Field solve_one(const Grid& grid, const Field& p, Rhs rhs, std::optional<ZerothOrder> zeroth,
                const Field& init, const SolverConfig& cfg) {
    PlapProblem prob;
    prob.grid = &grid;
    prob.p = p;
    prob.rhs = std::move(rhs);
    prob.zeroth = std::move(zeroth);
    auto [u, rep] = solve_dirichlet(prob, cfg, init);
    if (!rep.converged)
        throw SystemError("inner solve failed to converge: " + rep.diagnostic);
    return u;
}

// Augmentation exponent field: user-supplied or the default built from
// the coupling exponents and the fitted distance-growth rate of the
// other component, clamped into [-1, 0).
Field gamma_field(const Grid& grid, const std::optional<ExprField>& user, const Field& ea,
                  const Field& eb, double theta_other) {
    if (user) return eval_on_grid(*user, grid);
    Field g(grid);
    for (int k = 0; k < grid.node_count(); ++k) {
        double v = ea[k] + eb[k] - theta_other * (1.0 - eb[k]);
        g[k] = std::min(std::max(v, -1.0), -1e-9);
    }
    return g;
}

void check_gamma(const Field& g, double theta_other, const char* name) {
    for (int k = 0; k < g.size(); ++k)
        if (g[k] + theta_other < -1.0 - 1e-9)
            throw SystemError(std::string(name) +
                              " + fitted distance exponent drops below -1; the augmented "
                              "zeroth-order term would not be integrable");
}

// Augmentation term rho * z2t * (max{A, u^{p-1}} - A) with floor
// A = max{d^gamma, z1t^{p-1}}. The floor is folded into the zeroth-order
// derivative (subtract_threshold) rather than the RHS so that it cancels
// exactly -- at any fixed point u = z1t the floor dominates u^{p-1} and
// the whole term vanishes nodewise, independent of quadrature.
ZerothOrder augmentation(const Grid& grid, double rho, const Field& z1t, const Field& z2t,
                         const Field& p, const Field& gamma) {
    Field threshold(grid), coef(grid);
    for (int k = 0; k < grid.node_count(); ++k) {
        coef[k] = rho * z2t[k];
        if (!grid.is_interior(k)) continue;  // Dirichlet rows never use these
        threshold[k] = std::max(std::pow(grid.dist[k], gamma[k]), safe_pow(z1t[k], p[k] - 1.0));
    }
    return ZerothOrder{std::move(coef), std::move(threshold), true};
}

}  // namespace

StructureReport check_structure(const ProblemSpec& spec, const Grid& grid) {
    if (spec.N < 1) throw SystemError("spatial dimension must be at least 1");
    StructureReport rep;
    auto rng = [&](const ExprField& e, const char* name) {
        RangeSummary r = range_on_grid(e, grid);
        rep.ranges.emplace_back(name, r);
        if (r.aliasing_warning)
            rep.warnings.push_back(std::string(name) + ": range probe suggests grid aliasing");
        return r;
    };
    RangeSummary p = rng(spec.p, "p"), q = rng(spec.q, "q");
    RangeSummary a1 = rng(spec.alpha1, "alpha1"), a2 = rng(spec.alpha2, "alpha2");
    RangeSummary b1 = rng(spec.beta1, "beta1"), b2 = rng(spec.beta2, "beta2");

    bool coop = a2.inf > 0.0 && b1.inf > 0.0;
    bool comp = a2.sup < 0.0 && b1.sup < 0.0;
    if (!coop && !comp)
        throw SystemError("mixed coupling structure: alpha2 range [" + std::to_string(a2.inf) +
                          ", " + std::to_string(a2.sup) + "], beta1 range [" +
                          std::to_string(b1.inf) + ", " + std::to_string(b1.sup) + "]");
    rep.detected_mode = coop ? ProblemSpec::Mode::Cooperative : ProblemSpec::Mode::Competitive;
    rep.mode_matches = rep.detected_mode == spec.mode;

    auto add = [&](const std::string& name, double margin, const std::string& note = "") {
        rep.checks.push_back(HypothesisCheck{name, margin > 0.0, margin, note});
    };
    add(coop ? "cooperative_signs" : "competitive_signs",
        coop ? std::min(a2.inf, b1.inf) : std::min(-a2.sup, -b1.sup),
        "sign pattern of the cross exponents");
    add("p_above_one", p.inf - 1.0);
    add("q_above_one", q.inf - 1.0);
    if (grid.dim() >= 2) {
        add("p_below_dimension", spec.N - p.sup);
        add("q_below_dimension", spec.N - q.sup);
    } else {
        rep.warnings.push_back(
            "1D surrogate grid: dimensional upper bound on p, q waived");
    }

    double invN = 1.0 / spec.N;
    if (coop) {
        add("alpha2_below_p_growth", (p.inf - 1.0) - a2.sup, "sup alpha2 < inf p - 1");
        add("beta1_below_q_growth", (q.inf - 1.0) - b1.sup, "sup beta1 < inf q - 1");
        add("alpha1_negative", -a1.sup);
        add("beta2_negative", -b2.sup);
        add("alpha1_lower_bound", a1.inf + invN, "inf alpha1 > -1/N");
        add("beta2_lower_bound", b2.inf + invN, "inf beta2 > -1/N");
    } else {
        add("alpha1_negative", -a1.sup);
        add("beta2_negative", -b2.sup);
        add("alpha1_lower_bound", a1.inf - std::max(-invN, -(p.inf - 1.0)),
            "inf alpha1 > max(-1/N, 1 - inf p)");
        add("beta2_lower_bound", b2.inf - std::max(-invN, -(q.inf - 1.0)),
            "inf beta2 > max(-1/N, 1 - inf q)");
        add("coupling_sum_u", (a1.inf + b1.inf) + invN, "inf(alpha1+beta1) > -1/N");
        add("coupling_sum_v", (a2.inf + b2.inf) + invN, "inf(alpha2+beta2) > -1/N");
    }

    // Boundary-limit surrogate: sample N*exponent on the strip for the
    // singular (negative) exponents and flag exits from (-1, 0).
    SpecFields f = eval_spec(spec, grid);
    const std::pair<const char*, const Field*> singular[] = {{"alpha1", &f.a1},
                                                             {"beta2", &f.b2}};
    for (auto [name, fld] : singular) {
        double lo = kInf, hi = -kInf;
        for (int k : grid.interior_nodes()) {
            if (grid.dist[k] >= spec.delta) continue;
            double v = spec.N * (*fld)[k];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo <= -1.0 || hi >= 0.0)
            rep.warnings.push_back(std::string("N*") + name + " on the strip leaves (-1,0): [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return rep;
}

Field truncate(const Field& z, const Field& lower, const Field& upper) {
    const Grid& g = z.grid();
    if ((lower.values > upper.values).any())
        throw SystemError("truncation bounds are not ordered");
    Field out(g);
    out.values = z.values.max(lower.values).min(upper.values);
    return out;
}

std::pair<Field, Field> operator_T_coop(const ProblemSpec& spec, const Grid& grid,
                                        const Bracket& bracket, const Field& z1, const Field& z2,
                                        const SolverConfig& cfg,
                                        std::vector<std::string>* diagnostics) {
    Field z1t = truncate(z1, bracket.u_low, bracket.u_high);
    Field z2t = truncate(z2, bracket.v_low, bracket.v_high);
    SpecFields f = eval_spec(spec, grid);
    Rhs fr = coupled_rhs(grid, bracket.lambda, z1t, f.a1, z2t, f.b1, bracket.delta);
    Rhs gr = coupled_rhs(grid, bracket.lambda, z1t, f.a2, z2t, f.b2, bracket.delta);
    envelope_check(grid, fr, bracket.delta, "first equation", diagnostics);
    envelope_check(grid, gr, bracket.delta, "second equation", diagnostics);
    Field u = solve_one(grid, f.p, std::move(fr), std::nullopt, z1t, cfg);
    Field v = solve_one(grid, f.q, std::move(gr), std::nullopt, z2t, cfg);
    return {std::move(u), std::move(v)};
}

double rho_estimate(const ProblemSpec& spec, const Grid& grid, const Bracket& bracket) {
    if (spec.mode != ProblemSpec::Mode::Competitive)
        throw SystemError("augmentation weight is only defined for competitive systems");
    SpecFields f = eval_spec(spec, grid);
    double theta1 = fit_distance_exponent(grid, bracket.u_high, bracket.delta);
    double theta2 = fit_distance_exponent(grid, bracket.v_high, bracket.delta);
    Field g1 = gamma_field(grid, spec.gamma1, f.a1, f.b1, theta2);
    Field g2 = gamma_field(grid, spec.gamma2, f.b2, f.a2, theta1);
    check_gamma(g1, theta2, "gamma1");
    check_gamma(g2, theta1, "gamma2");

    double worst = 0.0;
    for (int k : grid.interior_nodes()) {
        double d = grid.dist[k];
        double df = bracket.lambda * std::abs(f.b1[k]) * safe_pow(bracket.u_low[k], f.a1[k]) *
                    safe_pow(bracket.v_low[k], f.b1[k] - 1.0);
        double den_f = std::max(std::pow(d, g1[k]), safe_pow(bracket.u_low[k], f.p[k] - 1.0));
        double dg = bracket.lambda * std::abs(f.a2[k]) * safe_pow(bracket.u_low[k], f.a2[k] - 1.0) *
                    safe_pow(bracket.v_low[k], f.b2[k]);
        double den_g = std::max(std::pow(d, g2[k]), safe_pow(bracket.v_low[k], f.q[k] - 1.0));
        worst = std::max(worst, std::max(df / den_f, dg / den_g));
    }
    return 2.0 * worst;
}

std::pair<Field, Field> operator_T_comp(const ProblemSpec& spec, const Grid& grid,
                                        const Bracket& bracket, const Field& z1, const Field& z2,
                                        double rho, const SolverConfig& cfg,
                                        std::vector<std::string>* diagnostics) {
    if (rho < 0.0) throw SystemError("augmentation weight must be nonnegative");
    Field z1t = truncate(z1, bracket.u_low, bracket.u_high);
    Field z2t = truncate(z2, bracket.v_low, bracket.v_high);
    SpecFields f = eval_spec(spec, grid);
    double theta1 = fit_distance_exponent(grid, bracket.u_high, bracket.delta);
    double theta2 = fit_distance_exponent(grid, bracket.v_high, bracket.delta);
    Field g1 = gamma_field(grid, spec.gamma1, f.a1, f.b1, theta2);
    Field g2 = gamma_field(grid, spec.gamma2, f.b2, f.a2, theta1);
    check_gamma(g1, theta2, "gamma1");
    check_gamma(g2, theta1, "gamma2");

    Rhs fr = coupled_rhs(grid, bracket.lambda, z1t, f.a1, z2t, f.b1, bracket.delta);
    Rhs gr = coupled_rhs(grid, bracket.lambda, z1t, f.a2, z2t, f.b2, bracket.delta);
    envelope_check(grid, fr, bracket.delta, "first equation", diagnostics);
    envelope_check(grid, gr, bracket.delta, "second equation", diagnostics);

    ZerothOrder au = augmentation(grid, rho, z1t, z2t, f.p, g1);
    ZerothOrder av = augmentation(grid, rho, z2t, z1t, f.q, g2);
    Field u = solve_one(grid, f.p, std::move(fr), std::move(au), z1t, cfg);
    Field v = solve_one(grid, f.q, std::move(gr), std::move(av), z2t, cfg);
    return {std::move(u), std::move(v)};
}

std::tuple<Field, Field, FixedPointReport> fixed_point_solve(const ProblemSpec& spec,
                                                             const Grid& grid,
                                                             const Bracket& bracket,
                                                             const SolverConfig& cfg) {
    FixedPointReport rep;
    const bool comp = spec.mode == ProblemSpec::Mode::Competitive;
    rep.rho = comp ? spec.rho.value_or(rho_estimate(spec, grid, bracket)) : 0.0;

    // Stage 1: bracketed Picard. Stage 2 repeats the iteration with the
    // truncation bounds widened (halved lows, doubled highs): the
    // bracketed fixed point can sit on the clamp within the containment
    // slack, and only with the clamp inactive is the limit a genuine
    // discrete solution of the plain coupled system.
    Bracket wide = bracket;
    wide.u_low.values /= 2.0;
    wide.v_low.values /= 2.0;
    wide.u_high.values *= 2.0;
    wide.v_high.values *= 2.0;
    auto apply_stage = [&](const Bracket& br, const Field& u, const Field& v) {
        return comp ? operator_T_comp(spec, grid, br, u, v, rep.rho, cfg)
                    : operator_T_coop(spec, grid, br, u, v, cfg);
    };

    Field u = bracket.u_low, v = bracket.v_low;
    for (int stage = 0; stage < 2 && rep.diagnostic.empty(); ++stage) {
        rep.converged = false;
        int base = static_cast<int>(rep.sup_changes.size());
        for (int it = 0; it < 200; ++it) {
            auto [un, vn] = apply_stage(stage == 0 ? bracket : wide, u, v);
            double change = std::max((un.values - u.values).abs().maxCoeff(),
                                     (vn.values - v.values).abs().maxCoeff());
            u = std::move(un);
            v = std::move(vn);
            rep.sup_changes.push_back(change);
            rep.iterations = base + it + 1;
            if (change < 1e-8) {
                rep.converged = true;
                break;
            }
            if (it >= 30 && change > 0.99 * rep.sup_changes[base + it - 30]) {
                rep.diagnostic = "sup-change plateau over 30 iterations";
                break;
            }
        }
        if (!rep.converged && rep.diagnostic.empty())
            rep.diagnostic = "no convergence within 200 iterations";
    }

    double slack = 10.0 * grid.h();
    for (int k : grid.interior_nodes()) {
        bool ok = u[k] >= bracket.u_low[k] - slack && u[k] <= bracket.u_high[k] + slack &&
                  v[k] >= bracket.v_low[k] - slack && v[k] <= bracket.v_high[k] + slack &&
                  u[k] > 0.0 && v[k] > 0.0;
        if (!ok) ++rep.bracket_violations;
    }

    SpecFields f = eval_spec(spec, grid);
    PlapProblem pu, pv;
    pu.grid = pv.grid = &grid;
    pu.p = f.p;
    pv.p = f.q;
    pu.rhs = coupled_rhs(grid, bracket.lambda, u, f.a1, v, f.b1, bracket.delta);
    pv.rhs = coupled_rhs(grid, bracket.lambda, u, f.a2, v, f.b2, bracket.delta);
    auto tests = default_test_fields(grid, cfg.seed);
    rep.weak_residual_u = weak_residual(pu, u, tests);
    rep.weak_residual_v = weak_residual(pv, v, tests);

    rep.growth_c_u = kInf;
    rep.growth_c_v = kInf;
    for (int k : grid.interior_nodes()) {
        double d = grid.dist[k];
        if (d >= bracket.delta) continue;
        rep.growth_c_u = std::min(rep.growth_c_u, u[k] / d);
        rep.growth_c_v = std::min(rep.growth_c_v, v[k] / d);
    }
    return {std::move(u), std::move(v), std::move(rep)};
}

}  // namespace plx
