#include "plx/brackets.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace plx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Negative powers of bracket iterates must never see a nonpositive base;
// positivity is certified separately, so clamp instead of throwing.
double safe_pow(double base, double ex) { return std::pow(std::max(base, 1e-12), ex); }

BoundCertificate make_min_cert(const std::string& name, const Grid& g,
                               const std::function<double(int)>& margin_at, double slack) {
    BoundCertificate c;
    c.name = name;
    c.margin = kInf;
    for (int k : g.interior_nodes()) {
        double m = margin_at(k);
        if (m < c.margin) {
            c.margin = m;
            c.location = k;
        }
    }
    c.satisfied = c.margin >= -slack;
    return c;
}

// lambda * u^a * v^b at interior nodes (0 at boundary rows).
Field coupled_power(const Grid& g, double scale, const Field& u, const Field& a, const Field& v,
                    const Field& b) {
    Field f(g);
    for (int k : g.interior_nodes()) f[k] = scale * safe_pow(u[k], a[k]) * safe_pow(v[k], b[k]);
    return f;
}

// One-sided inequality between the discrete operator value and a nodal
// right-hand side: sign=+1 certifies op(u) <= f (subsolution side),
// sign=-1 certifies op(u) >= f. Margins are normalized so singular
// near-boundary magnitudes do not drown the interior.
BoundCertificate operator_ineq_cert(const std::string& name, const Grid& g, const Field& p,
                                    const Field& u, const Field& f, int sign, double slack) {
    Field op = apply_plap_operator(g, p, u);
    return make_min_cert(
        name, g,
        [&](int k) {
            return sign * (f[k] - op[k]) / (1.0 + std::abs(f[k]) + std::abs(op[k]));
        },
        slack);
}

// scale * base(x)^gamma(x) with separate scales on / off the strip
// d < delta; the strip factor is kept in factored singular form.
Rhs barrier_power_rhs(const Grid& g, const Field& base, const Field& gamma, double scale_strip,
                      double scale_off, double delta) {
    Rhs r = Rhs::singular_power(g, base, gamma, 1.0, delta);
    r.pieces[0].smooth.values *= scale_strip;
    r.pieces[1].smooth.values *= scale_off;
    return r;
}

Rhs restrict_rhs(const Grid& g, const Rhs& rhs, double lo, double hi) {
    Rhs out;
    for (const auto& piece : rhs.pieces) {
        RhsPiece clipped = piece;
        clipped.d_min = std::max(piece.d_min, lo);
        clipped.d_max = std::min(piece.d_max, hi);
        if (clipped.d_min < clipped.d_max) out.pieces.push_back(std::move(clipped));
    }
    (void)g;
    return out;
}

Field solve_plap(const Grid& g, const Field& p, Rhs rhs, const SolverConfig& cfg,
                 SolveReport* rep_out = nullptr, const std::optional<Field>& init = {}) {
    PlapProblem prob;
    prob.grid = &g;
    prob.p = p;
    prob.rhs = std::move(rhs);
    auto [u, rep] = solve_dirichlet(prob, cfg, init);
    if (rep_out) *rep_out = rep;
    return u;
}

void append_prefixed(std::vector<BoundCertificate>& dst, const std::string& prefix,
                     const std::vector<BoundCertificate>& src) {
    for (BoundCertificate c : src) {
        c.name = prefix + c.name;
        dst.push_back(std::move(c));
    }
}

}  // namespace

Field wedge_barrier(const Grid& grid, const Field& p, double delta) {
    double pm = p.values.minCoeff();
    if (pm <= 1.0)
        throw BracketError("barrier requires inf p > 1 (got " + std::to_string(pm) + ")");
    if (delta <= 0.0 || delta > 0.25 * grid.max_dist() + 1e-14)
        throw BracketError("barrier width delta must lie in (0, max_dist/4]");
    double m = 2.0 / (pm - 1.0);
    Field w(grid);
    for (int k = 0; k < grid.node_count(); ++k) {
        double d = grid.dist[k];
        if (d < delta) {
            w[k] = d;
        } else {
            double t1 = std::min(d, 2.0 * delta);
            double tail = std::pow((2.0 * delta - t1) / delta, m + 1.0);
            w[k] = delta + delta / (m + 1.0) * (1.0 - tail);
        }
    }
    return w;
}

ScalarResult solve_singular_scalar(const Grid& grid, const Field& p, const ExprField& gamma,
                                   double lambda, double delta, const SolverConfig& cfg,
                                   GrowthFit* fit) {
    if (lambda <= 0.0) throw BracketError("scalar problem requires lambda > 0");
    Field gf = eval_on_grid(gamma, grid);
    double gmin = gf.values.minCoeff(), gmax = gf.values.maxCoeff();
    if (gmin <= -1.0 || gmax >= 0.0)
        throw BracketError("singular exponent must satisfy -1 < gamma < 0 (range [" +
                           std::to_string(gmin) + ", " + std::to_string(gmax) + "])");

    Field w = wedge_barrier(grid, p, delta);
    Field u = w;
    double slack = 10.0 * grid.h();

    ScalarResult res;
    double change = kInf;
    for (int it = 0; it < 200; ++it) {
        Field base(grid);
        for (int k = 0; k < grid.node_count(); ++k) base[k] = std::max(u[k], w[k]);
        Rhs rhs = Rhs::singular_power(grid, base, gf, lambda, delta);
        Field next = solve_plap(grid, p, std::move(rhs), cfg, nullptr, u);
        change = (next.values - u.values).abs().maxCoeff();
        u = next;
        res.iterations = it + 1;
        if (change < 1e-8) {
            res.converged = true;
            break;
        }
    }
    res.u = u;

    BoundCertificate fp;
    fp.name = "fixed_point";
    fp.satisfied = res.converged;
    fp.margin = 1e-8 - change;
    if (!res.converged)
        fp.note = "sup-change " + std::to_string(change) + " after " +
                  std::to_string(res.iterations) + " iterations";
    res.certificates.push_back(fp);

    res.certificates.push_back(
        make_min_cert("floor", grid, [&](int k) { return u[k] - w[k]; }, slack));
    res.certificates.push_back(make_min_cert(
        "dist_lower", grid, [&](int k) { return u[k] - std::min(delta, grid.dist[k]); }, slack));

    double pm = p.values.minCoeff();
    double rate = std::pow(lambda, 1.0 / (pm - 1.0));
    double umax = u.sup_abs();
    BoundCertificate growth;
    growth.name = "growth";
    if (fit && fit->fitted) {
        growth.margin = 1.1 * fit->C * rate - umax;
        growth.note = "C fitted earlier at smaller lambda";
    } else {
        double C = umax / rate;
        if (fit) {
            fit->fitted = true;
            fit->C = C;
        }
        growth.margin = 0.1 * C * rate;  // fitting point: slack by construction
        growth.note = "C fitted here: " + std::to_string(C);
    }
    growth.satisfied = growth.margin >= -1e-12 * (1.0 + umax);
    res.certificates.push_back(growth);
    return res;
}

BoundCertificate perturbed_half_bound_check(const Grid& grid, const Field& p, const Rhs& h,
                                            const Rhs& h_tilde, double eps,
                                            const SolverConfig& cfg) {
    Field hn = h.eval_at_nodes(grid);
    if (hn.values.minCoeff() < -1e-12)
        throw BracketError("base right-hand side must be nonnegative");
    if (hn.values.maxCoeff() <= 0.0 && h.power_inf(grid) == kInf)
        throw BracketError("base right-hand side must not vanish identically");

    Field u = solve_plap(grid, p, h, cfg);
    Rhs mixed = restrict_rhs(grid, h, eps, kInf);
    Rhs strip = restrict_rhs(grid, h_tilde, 0.0, eps);
    for (auto& piece : strip.pieces) mixed.pieces.push_back(std::move(piece));
    Field u_eps = solve_plap(grid, p, std::move(mixed), cfg);

    double slack = 10.0 * grid.h();
    BoundCertificate c = make_min_cert(
        "perturbed_half_bound", grid, [&](int k) { return u_eps[k] - 0.5 * u[k]; }, slack);
    c.note = "strip width " + std::to_string(eps);
    return c;
}

double perturbed_half_bound_crossover(const Grid& grid, const Field& p, const Rhs& h,
                                      const Rhs& h_tilde, double eps_lo, double eps_hi,
                                      const SolverConfig& cfg) {
    if (!(eps_lo > 0.0 && eps_lo < eps_hi))
        throw BracketError("crossover search requires 0 < eps_lo < eps_hi");
    if (!perturbed_half_bound_check(grid, p, h, h_tilde, eps_lo, cfg).satisfied)
        throw BracketError("half bound already fails at eps_lo");
    if (perturbed_half_bound_check(grid, p, h, h_tilde, eps_hi, cfg).satisfied)
        throw BracketError("half bound still passes at eps_hi");
    for (int it = 0; it < 30 && eps_hi - eps_lo > 1e-4 * eps_hi; ++it) {
        double mid = 0.5 * (eps_lo + eps_hi);
        if (perturbed_half_bound_check(grid, p, h, h_tilde, mid, cfg).satisfied)
            eps_lo = mid;
        else
            eps_hi = mid;
    }
    return eps_lo;
}

double sigma_bar_lower_bound(double p_minus, double q_minus, double alpha2_plus,
                             double beta1_plus) {
    if (alpha2_plus >= p_minus - 1.0)
        throw BracketError("hypothesis sup alpha2 < inf p - 1 fails");
    if (beta1_plus >= q_minus - 1.0)
        throw BracketError("hypothesis sup beta1 < inf q - 1 fails");
    return std::max((p_minus - 1.0) / (p_minus - 1.0 - alpha2_plus),
                    (q_minus - 1.0) / (q_minus - 1.0 - beta1_plus));
}

double fit_distance_exponent(const Grid& grid, const Field& u, double delta) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k : grid.interior_nodes()) {
        double d = grid.dist[k];
        if (d <= 0.0 || d >= delta || u[k] <= 0.0) continue;
        double lx = std::log(d), ly = std::log(u[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    double var = n * sxx - sx * sx;
    if (n < 2 || var <= 0.0)
        throw BracketError("too few strip nodes to fit a distance exponent");
    return (n * sxy - sx * sy) / var;
}

Bracket cooperative_bracket(const ProblemSpec& spec, const Grid& grid, const SolverConfig& cfg) {
    const double lambda = spec.lambda;
    if (lambda <= 0.0) throw BracketError("bracket construction requires lambda > 0");
    if (!(spec.sigma > 0.0 && spec.sigma < 1.0))
        throw BracketError("cooperative construction requires sigma in (0,1)");

    Field pf = eval_on_grid(spec.p, grid), qf = eval_on_grid(spec.q, grid);
    Field a1 = eval_on_grid(spec.alpha1, grid), a2 = eval_on_grid(spec.alpha2, grid);
    Field b1 = eval_on_grid(spec.beta1, grid), b2 = eval_on_grid(spec.beta2, grid);

    Bracket br;
    br.lambda = lambda;
    br.sigma = spec.sigma;
    br.delta = spec.delta;
    double slack = 10.0 * grid.h();
    double lam_s = std::pow(lambda, spec.sigma);

    ScalarResult w1r = solve_singular_scalar(grid, pf, spec.alpha1, lam_s, spec.delta, cfg);
    ScalarResult w2r = solve_singular_scalar(grid, qf, spec.beta2, lam_s, spec.delta, cfg);
    append_prefixed(br.certificates, "w1_", w1r.certificates);
    append_prefixed(br.certificates, "w2_", w2r.certificates);
    const Field& w1 = w1r.u;
    const Field& w2 = w2r.u;

    // Subsolution pair: positive-barrier RHS away from the boundary,
    // small negative RHS on the strip.
    br.u_low = solve_plap(grid, pf, barrier_power_rhs(grid, w1, a1, -1.0, lam_s, spec.delta), cfg);
    br.v_low = solve_plap(grid, qf, barrier_power_rhs(grid, w2, b2, -1.0, lam_s, spec.delta), cfg);

    // Supersolution pair: constant-RHS solves on the enlarged domain,
    // restricted back to the original nodes (boundary rows stored as 0).
    double pm = pf.values.minCoeff(), qm = qf.values.minCoeff();
    double bound =
        sigma_bar_lower_bound(pm, qm, a2.values.maxCoeff(), b1.values.maxCoeff());
    double sbar = spec.sigma_bar.value_or(bound + 0.25);
    if (sbar <= bound)
        throw BracketError("sigma_bar must exceed its lower bound " + std::to_string(bound));
    br.sigma_bar = sbar;
    double lam_sb = std::pow(lambda, sbar);

    PaddedGrid padded = padded_grid(grid, spec.pad_frac);
    Field pp = eval_on_grid(spec.p, *padded.grid), qp = eval_on_grid(spec.q, *padded.grid);
    Field u_tilde = solve_plap(*padded.grid, pp, Rhs::plain(Field(*padded.grid, lam_sb)), cfg);
    Field v_tilde = solve_plap(*padded.grid, qp, Rhs::plain(Field(*padded.grid, lam_sb)), cfg);
    br.u_high = Field(grid);
    br.v_high = Field(grid);
    for (int k : grid.interior_nodes()) {
        br.u_high[k] = u_tilde[padded.index_map[k]];
        br.v_high[k] = v_tilde[padded.index_map[k]];
    }

    br.certificates.push_back(
        make_min_cert("positive_u_low", grid, [&](int k) { return br.u_low[k]; }, 0.0));
    br.certificates.back().satisfied = br.certificates.back().margin > 0.0;
    br.certificates.push_back(
        make_min_cert("positive_v_low", grid, [&](int k) { return br.v_low[k]; }, 0.0));
    br.certificates.back().satisfied = br.certificates.back().margin > 0.0;

    br.certificates.push_back(make_min_cert(
        "sandwich_u", grid,
        [&](int k) { return std::min(br.u_low[k] - 0.5 * w1[k], w1[k] - br.u_low[k]); }, slack));
    br.certificates.push_back(make_min_cert(
        "sandwich_v", grid,
        [&](int k) { return std::min(br.v_low[k] - 0.5 * w2[k], w2[k] - br.v_low[k]); }, slack));

    {
        BoundCertificate c = make_min_cert(
            "super_range_u", grid, [&](int k) { return br.u_high[k]; }, 0.0);
        c.satisfied = c.margin > 0.0;
        std::ostringstream os;
        os << "c0=" << c.margin / spec.delta
           << " c2=" << br.u_high.sup_abs() / std::pow(lambda, sbar / (pm - 1.0));
        c.note = os.str();
        br.certificates.push_back(c);
        c = make_min_cert("super_range_v", grid, [&](int k) { return br.v_high[k]; }, 0.0);
        c.satisfied = c.margin > 0.0;
        os.str("");
        os << "c0=" << c.margin / spec.delta
           << " c2=" << br.v_high.sup_abs() / std::pow(lambda, sbar / (qm - 1.0));
        c.note = os.str();
        br.certificates.push_back(c);
    }

    br.certificates.push_back(make_min_cert(
        "ordering_u", grid, [&](int k) { return br.u_high[k] - br.u_low[k]; }, slack));
    br.certificates.push_back(make_min_cert(
        "ordering_v", grid, [&](int k) { return br.v_high[k] - br.v_low[k]; }, slack));

    // Weak differential inequalities against nonnegative hats: for the
    // subsolution the worst in-bracket partner is the low end (RHS is
    // increasing in the other component), for the supersolution the high
    // end.
    Field f_sub = coupled_power(grid, lambda, br.u_low, a1, br.v_low, b1);
    Field g_sub = coupled_power(grid, lambda, br.u_low, a2, br.v_low, b2);
    Field f_sup = coupled_power(grid, lambda, br.u_high, a1, br.v_high, b1);
    Field g_sup = coupled_power(grid, lambda, br.u_high, a2, br.v_high, b2);
    br.certificates.push_back(operator_ineq_cert("weak_sub_u", grid, pf, br.u_low, f_sub, +1, slack));
    br.certificates.push_back(operator_ineq_cert("weak_sub_v", grid, qf, br.v_low, g_sub, +1, slack));
    br.certificates.push_back(
        operator_ineq_cert("weak_super_u", grid, pf, br.u_high, f_sup, -1, slack));
    br.certificates.push_back(
        operator_ineq_cert("weak_super_v", grid, qf, br.v_high, g_sup, -1, slack));
    return br;
}

Bracket competitive_bracket(const ProblemSpec& spec, const Grid& grid, const SolverConfig& cfg) {
    const double lambda = spec.lambda;
    if (lambda <= 0.0) throw BracketError("bracket construction requires lambda > 0");
    if (!(spec.sigma > 1.0))
        throw BracketError("competitive construction requires sigma > 1");

    Field pf = eval_on_grid(spec.p, grid), qf = eval_on_grid(spec.q, grid);
    Field a1 = eval_on_grid(spec.alpha1, grid), a2 = eval_on_grid(spec.alpha2, grid);
    Field b1 = eval_on_grid(spec.beta1, grid), b2 = eval_on_grid(spec.beta2, grid);

    Bracket br;
    br.lambda = lambda;
    br.sigma = spec.sigma;
    br.delta = spec.delta;
    double slack = 10.0 * grid.h();
    double lam_s = std::pow(lambda, spec.sigma);

    ScalarResult w1r = solve_singular_scalar(grid, pf, spec.alpha1, lam_s, spec.delta, cfg);
    ScalarResult w2r = solve_singular_scalar(grid, qf, spec.beta2, lam_s, spec.delta, cfg);
    append_prefixed(br.certificates, "w1_", w1r.certificates);
    append_prefixed(br.certificates, "w2_", w2r.certificates);
    const Field& w1 = w1r.u;
    const Field& w2 = w2r.u;

    auto upper_rhs = [&](const Field& w, const Field& ea, const Field& eb) {
        // strip: lam^sigma * d^(ea+eb) in factored form; off-strip:
        // lam^sigma * w^ea as plain nodal values.
        Rhs r;
        Field strip_smooth(grid, lam_s), strip_power(grid);
        strip_power.values = ea.values + eb.values;
        Field off(grid);
        for (int k = 0; k < grid.node_count(); ++k) {
            int m = grid.dist[k] > 0 ? k : grid.nearest_interior(k);
            off[k] = lam_s * safe_pow(w[m], ea[k]);
        }
        r.pieces.push_back(RhsPiece{0.0, spec.delta, std::move(strip_smooth), std::move(strip_power)});
        r.pieces.push_back(RhsPiece{spec.delta, kInf, std::move(off), std::nullopt});
        return r;
    };
    br.u_high = solve_plap(grid, pf, upper_rhs(w1, a1, b1), cfg);
    br.v_high = solve_plap(grid, qf, upper_rhs(w2, b2, a2), cfg);

    auto sign_rhs = [&]() {
        Rhs r;
        r.pieces.push_back(RhsPiece{0.0, spec.delta, Field(grid, -1.0), std::nullopt});
        r.pieces.push_back(RhsPiece{spec.delta, kInf, Field(grid, 1.0), std::nullopt});
        return r;
    };
    br.u_low = solve_plap(grid, pf, sign_rhs(), cfg);
    br.v_low = solve_plap(grid, qf, sign_rhs(), cfg);

    br.certificates.push_back(
        make_min_cert("positive_u_low", grid, [&](int k) { return br.u_low[k]; }, 0.0));
    br.certificates.back().satisfied = br.certificates.back().margin > 0.0;
    br.certificates.push_back(
        make_min_cert("positive_v_low", grid, [&](int k) { return br.v_low[k]; }, 0.0));
    br.certificates.back().satisfied = br.certificates.back().margin > 0.0;

    br.certificates.push_back(make_min_cert(
        "half_barrier_u", grid, [&](int k) { return br.u_high[k] - 0.5 * w1[k]; }, slack));
    br.certificates.push_back(make_min_cert(
        "half_barrier_v", grid, [&](int k) { return br.v_high[k] - 0.5 * w2[k]; }, slack));

    const std::pair<const char*, const Field*> lows[] = {{"dist_bound_u_low", &br.u_low},
                                                         {"dist_bound_v_low", &br.v_low}};
    for (auto [name, low] : lows) {
        double c3 = kInf;
        for (int k : grid.interior_nodes())
            c3 = std::min(c3, (*low)[k] / std::min(spec.delta, grid.dist[k]));
        BoundCertificate c;
        c.name = name;
        c.margin = c3;
        c.satisfied = c3 > 0.0;
        c.note = "c_upper=" + std::to_string(low->sup_abs());
        br.certificates.push_back(c);
    }

    br.certificates.push_back(make_min_cert(
        "ordering_u", grid, [&](int k) { return br.u_high[k] - br.u_low[k]; }, slack));
    br.certificates.push_back(make_min_cert(
        "ordering_v", grid, [&](int k) { return br.v_high[k] - br.v_low[k]; }, slack));

    const std::pair<const char*, const Field*> highs[] = {{"theta1_range", &br.u_high},
                                                          {"theta2_range", &br.v_high}};
    for (auto [name, fld] : highs) {
        double theta = fit_distance_exponent(grid, *fld, spec.delta);
        BoundCertificate c;
        c.name = name;
        c.margin = std::min(theta - 0.8, 1.0 + 1e-9 - theta);
        c.satisfied = c.margin >= 0.0;
        c.note = "theta=" + std::to_string(theta);
        br.certificates.push_back(c);
    }

    Field f_low = coupled_power(grid, lambda, br.u_low, a1, br.v_low, b1);
    Field g_low = coupled_power(grid, lambda, br.u_low, a2, br.v_low, b2);
    Field f_high = coupled_power(grid, lambda, br.u_high, a1, br.v_high, b1);
    Field g_high = coupled_power(grid, lambda, br.u_high, a2, br.v_high, b2);
    br.certificates.push_back(
        operator_ineq_cert("pointwise_sub_u", grid, pf, br.u_low, f_low, +1, slack));
    br.certificates.push_back(
        operator_ineq_cert("pointwise_sub_v", grid, qf, br.v_low, g_low, +1, slack));
    br.certificates.push_back(
        operator_ineq_cert("pointwise_super_u", grid, pf, br.u_high, f_high, -1, slack));
    br.certificates.push_back(
        operator_ineq_cert("pointwise_super_v", grid, qf, br.v_high, g_high, -1, slack));
    return br;
}

std::pair<double, Bracket> tune_lambda(const BracketBuilder& builder, const ProblemSpec& spec,
                                       const Grid& grid, const SolverConfig& cfg,
                                       double lambda0) {
    if (lambda0 <= 0.0) throw BracketError("lambda0 must be positive");
    ProblemSpec trial = spec;
    double lam = lambda0;
    std::vector<std::string> last_failures;
    for (int it = 0; it <= 30; ++it) {
        trial.lambda = lam;
        Bracket br = builder(trial, grid, cfg);
        if (br.all_pass()) return {lam, std::move(br)};
        last_failures.clear();
        for (const auto& c : br.certificates)
            if (!c.satisfied) last_failures.push_back(c.name);
        lam *= 2.0;
    }
    std::string msg = "no passing lambda within 30 doublings; persistent failures:";
    for (const auto& n : last_failures) msg += " " + n;
    throw BracketError(msg);
}

}  // namespace plx
