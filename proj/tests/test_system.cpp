#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "plx/brackets.hpp"
#include "plx/domain.hpp"
#include "plx/expr.hpp"
#include "plx/inequalities.hpp"
#include "plx/system.hpp"

using namespace plx;

static ProblemSpec coop_spec() {
    ProblemSpec s;
    s.p = ExprField::parse("2.5 + 0.2*sin(pi*x)");
    s.q = s.p;
    s.alpha1 = ExprField::parse("-0.05");
    s.beta1 = ExprField::parse("0.5");
    s.alpha2 = ExprField::parse("0.5");
    s.beta2 = ExprField::parse("-0.05");
    s.mode = ProblemSpec::Mode::Cooperative;
    s.sigma = 0.5;
    s.delta = 0.05;
    s.N = 1;
    return s;
}

static ProblemSpec comp_spec() {
    ProblemSpec s;
    s.p = ExprField::parse("2.5 + 0.2*sin(pi*x)");
    s.q = s.p;
    s.alpha1 = ExprField::parse("-0.2");
    s.beta1 = ExprField::parse("-0.1");
    s.alpha2 = ExprField::parse("-0.1");
    s.beta2 = ExprField::parse("-0.2");
    s.mode = ProblemSpec::Mode::Competitive;
    s.sigma = 1.5;
    s.delta = 0.05;
    s.N = 1;
    return s;
}

TEST_CASE("structure gate accepts both coupling patterns and names failures") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    StructureReport coop = check_structure(coop_spec(), g);
    CHECK(coop.detected_mode == ProblemSpec::Mode::Cooperative);
    CHECK(coop.all_pass());

    StructureReport comp = check_structure(comp_spec(), g);
    CHECK(comp.detected_mode == ProblemSpec::Mode::Competitive);
    CHECK(comp.all_pass());

    // alpha1 = -0.6 in dimension 2 violates the -1/N lower bound and the
    // failing check must say so by name
    ProblemSpec bad = coop_spec();
    bad.alpha1 = ExprField::parse("-0.6");
    bad.N = 2;
    StructureReport r = check_structure(bad, g);
    CHECK_FALSE(r.all_pass());
    bool named = false;
    for (const auto& c : r.checks)
        if (c.name == "alpha1_lower_bound") {
            named = true;
            CHECK_FALSE(c.satisfied);
            CHECK(c.margin < 0.0);
        }
    CHECK(named);

    // mixed sign pattern is rejected outright
    ProblemSpec mixed = coop_spec();
    mixed.beta1 = ExprField::parse("x - 0.5");
    CHECK_THROWS_AS(check_structure(mixed, g), SystemError);
}

TEST_CASE("truncation clamps, is idempotent, and rejects unordered bounds") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 33);
    Field lo(g, 1.0), hi(g, 2.0), z(g);
    for (int k = 0; k < g.node_count(); ++k) z[k] = 3.0 * std::sin(7.0 * k);
    Field t = truncate(z, lo, hi);
    for (int k = 0; k < g.node_count(); ++k) {
        CHECK(t[k] >= 1.0);
        CHECK(t[k] <= 2.0);
        if (z[k] >= 1.0 && z[k] <= 2.0) CHECK(t[k] == z[k]);
    }
    Field tt = truncate(t, lo, hi);
    CHECK((tt.values - t.values).abs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(truncate(z, hi, lo), SystemError);
}

TEST_CASE("cooperative solution map sends the bracket into itself") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    SolverConfig cfg;
    ProblemSpec s = coop_spec();
    auto [lam, br] = tune_lambda(cooperative_bracket, s, g, cfg, 1.0);
    REQUIRE(br.all_pass());

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double slack = 10.0 * g.h();
    for (int trial = 0; trial < 20; ++trial) {
        Field z1(g), z2(g);
        for (int k = 0; k < g.node_count(); ++k) {
            double t1 = unif(rng), t2 = unif(rng);
            z1[k] = br.u_low[k] + t1 * (br.u_high[k] - br.u_low[k]);
            z2[k] = br.v_low[k] + t2 * (br.v_high[k] - br.v_low[k]);
        }
        auto [u, v] = operator_T_coop(s, g, br, z1, z2, cfg);
        for (int k : g.interior_nodes()) {
            CHECK(u[k] >= br.u_low[k] - slack);
            CHECK(u[k] <= br.u_high[k] + slack);
            CHECK(v[k] >= br.v_low[k] - slack);
            CHECK(v[k] <= br.v_high[k] + slack);
        }
    }
}

TEST_CASE("cooperative solution map preserves the componentwise order") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    SolverConfig cfg;
    ProblemSpec s = coop_spec();
    auto [lam, br] = tune_lambda(cooperative_bracket, s, g, cfg, 1.0);
    REQUIRE(br.all_pass());

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double slack = 10.0 * g.h();
    for (int trial = 0; trial < 5; ++trial) {
        Field a1(g), a2(g), b1(g), b2(g);
        for (int k = 0; k < g.node_count(); ++k) {
            double lo1 = unif(rng), hi1 = lo1 + unif(rng) * (1.0 - lo1);
            double lo2 = unif(rng), hi2 = lo2 + unif(rng) * (1.0 - lo2);
            a1[k] = br.u_low[k] + lo1 * (br.u_high[k] - br.u_low[k]);
            b1[k] = br.u_low[k] + hi1 * (br.u_high[k] - br.u_low[k]);
            a2[k] = br.v_low[k] + lo2 * (br.v_high[k] - br.v_low[k]);
            b2[k] = br.v_low[k] + hi2 * (br.v_high[k] - br.v_low[k]);
        }
        auto [ua, va] = operator_T_coop(s, g, br, a1, a2, cfg);
        auto [ub, vb] = operator_T_coop(s, g, br, b1, b2, cfg);
        for (int k : g.interior_nodes()) {
            CHECK(ua[k] <= ub[k] + slack);
            CHECK(va[k] <= vb[k] + slack);
        }
    }
}

TEST_CASE("augmented competitive map is order-preserving at the estimated weight") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    SolverConfig cfg;
    ProblemSpec s = comp_spec();
    auto [lam, br] = tune_lambda(competitive_bracket, s, g, cfg, 1.0);
    REQUIRE(br.all_pass());
    double rho = rho_estimate(s, g, br);
    CHECK(rho > 0.0);

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double slack = 10.0 * g.h();
    for (int trial = 0; trial < 5; ++trial) {
        Field a1(g), a2(g), b1(g), b2(g);
        for (int k = 0; k < g.node_count(); ++k) {
            double lo1 = unif(rng), hi1 = lo1 + unif(rng) * (1.0 - lo1);
            double lo2 = unif(rng), hi2 = lo2 + unif(rng) * (1.0 - lo2);
            a1[k] = br.u_low[k] + lo1 * (br.u_high[k] - br.u_low[k]);
            b1[k] = br.u_low[k] + hi1 * (br.u_high[k] - br.u_low[k]);
            a2[k] = br.v_low[k] + lo2 * (br.v_high[k] - br.v_low[k]);
            b2[k] = br.v_low[k] + hi2 * (br.v_high[k] - br.v_low[k]);
        }
        // competitive order: increasing in own component, the opponent
        // enters with the mixed order (a1<=b1, a2<=b2 componentwise)
        auto [ua, va] = operator_T_comp(s, g, br, a1, a2, rho, cfg);
        auto [ub, vb] = operator_T_comp(s, g, br, b1, a2, rho, cfg);
        for (int k : g.interior_nodes()) CHECK(ua[k] <= ub[k] + slack);
        auto [uc, vc] = operator_T_comp(s, g, br, a1, b2, rho, cfg);
        for (int k : g.interior_nodes()) CHECK(va[k] <= vc[k] + slack);
    }
}

TEST_CASE("cooperative fixed point converges inside the bracket") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    SolverConfig cfg;
    ProblemSpec s = coop_spec();
    auto [lam, br] = tune_lambda(cooperative_bracket, s, g, cfg, 1.0);
    REQUIRE(br.all_pass());
    s.lambda = lam;
    auto [u, v, rep] = fixed_point_solve(s, g, br, cfg);
    CHECK(rep.converged);
    CHECK(rep.bracket_violations == 0);
    CHECK(rep.weak_residual_u <= 1e-6);
    CHECK(rep.weak_residual_v <= 1e-6);
    CHECK(rep.growth_c_u > 0.0);
    CHECK(rep.growth_c_v > 0.0);
    // re-applying the map moves the fixed point by at most the stop tol
    auto [u2, v2] = operator_T_coop(s, g, br, u, v, cfg);
    CHECK((u2.values - u.values).abs().maxCoeff() <= 1e-7);
    CHECK((v2.values - v.values).abs().maxCoeff() <= 1e-7);
    // tail of the sup-change history is decreasing
    size_t n = rep.sup_changes.size();
    if (n >= 3) CHECK(rep.sup_changes[n - 1] <= rep.sup_changes[n - 3]);
}

TEST_CASE("competitive fixed point converges with the augmentation") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    SolverConfig cfg;
    ProblemSpec s = comp_spec();
    auto [lam, br] = tune_lambda(competitive_bracket, s, g, cfg, 1.0);
    REQUIRE(br.all_pass());
    s.lambda = lam;
    auto [u, v, rep] = fixed_point_solve(s, g, br, cfg);
    CHECK(rep.converged);
    CHECK(rep.rho > 0.0);
    CHECK(rep.bracket_violations == 0);
    CHECK(rep.weak_residual_u <= 1e-6);
    CHECK(rep.weak_residual_v <= 1e-6);
    CHECK(rep.growth_c_u > 0.0);
    CHECK(rep.growth_c_v > 0.0);
}

TEST_CASE("power-map monotonicity inequalities hold on random samples") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> y(-10.0, 10.0);
    std::uniform_real_distribution<double> r_low(1.0 + 1e-3, 2.0 - 1e-9);
    std::uniform_real_distribution<double> r_high(2.0, 4.0);
    int bad = 0;
    for (int i = 0; i < 1000; ++i)
        if (!monotone_power_inequality_holds(r_low(rng), y(rng), y(rng))) ++bad;
    for (int i = 0; i < 1000; ++i)
        if (!monotone_power_inequality_holds(r_high(rng), y(rng), y(rng))) ++bad;
    CHECK(bad == 0);
    // equality-adjacent cases
    CHECK(monotone_power_inequality_holds(1.5, 3.0, 3.0));
    CHECK(monotone_power_inequality_holds(3.0, 0.0, 0.0));
    CHECK(monotone_power_inequality_holds(2.0, 1.0, -1.0));
}
