#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plx/domain.hpp"
#include "plx/expr.hpp"
#include "plx/quadrature.hpp"

using namespace plx;

TEST_CASE("interval grid layout and distance") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 5);
    CHECK(g.nx == 5);
    CHECK(g.ny == 1);
    CHECK(g.hx == doctest::Approx(0.25));
    const double want[5] = {0.0, 0.25, 0.5, 0.25, 0.0};
    for (int i = 0; i < 5; ++i) CHECK(g.dist[i] == doctest::Approx(want[i]));
    CHECK(g.boundary[0]);
    CHECK(g.boundary[4]);
    CHECK(g.interior_nodes().size() == 3);
    CHECK(g.max_dist() == doctest::Approx(0.5));
}

TEST_CASE("rectangle grid distance is min over sides") {
    auto g = build_grid(Domain::rectangle(0.0, 1.0, 0.0, 2.0), 5);
    CHECK(g.nx == 5);
    CHECK(g.ny == 5);
    CHECK(g.hx == doctest::Approx(0.25));
    CHECK(g.hy == doctest::Approx(0.5));
    // node (1,1) = (0.25, 0.5): min(0.25, 0.75, 0.5, 1.5) = 0.25
    CHECK(g.dist[g.index(1, 1)] == doctest::Approx(0.25));
    // center node (2,2) = (0.5, 1.0): min(0.5, 0.5, 1.0, 1.0) = 0.5
    CHECK(g.dist[g.index(2, 2)] == doctest::Approx(0.5));
    for (int i = 0; i < g.nx; ++i) {
        CHECK(g.boundary[g.index(i, 0)]);
        CHECK(g.boundary[g.index(i, g.ny - 1)]);
    }
}

TEST_CASE("disk grid masks exterior nodes as boundary") {
    auto g = build_grid(Domain::disk(0.0, 0.0, 1.0), 9);
    // corner node lies outside the disk: masked, dist clamped to 0
    CHECK(g.boundary[g.index(0, 0)]);
    CHECK(g.dist[g.index(0, 0)] == doctest::Approx(0.0));
    int c = g.index(4, 4);  // center
    CHECK_FALSE(g.boundary[c]);
    CHECK(g.dist[c] == doctest::Approx(1.0));
    CHECK(g.nearest_interior(g.index(0, 0)) != g.index(0, 0));
}

TEST_CASE("boundary strip and vacuity flag") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 9);
    bool vac = true;
    auto strip = boundary_strip(g, 0.2, &vac);
    CHECK_FALSE(vac);
    CHECK(strip.size() == 2);  // nodes at x=0.125 and x=0.875
    boundary_strip(g, 0.9, &vac);
    CHECK(vac);
}

TEST_CASE("padded grid keeps spacing and node alignment") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 9);
    auto pg = padded_grid(g, 0.1);
    CHECK(pg.grid->hx == doctest::Approx(g.hx));
    for (int k = 0; k < g.node_count(); ++k) {
        int kk = pg.index_map[k];
        CHECK(pg.grid->node_x[kk] == doctest::Approx(g.node_x[k]));
    }
    // every original node is interior to the padded domain
    CHECK_FALSE((*pg.grid).boundary[pg.index_map[0]]);
    CHECK(pg.grid->domain.ax < 0.0);
    CHECK(pg.grid->domain.bx > 1.0);
}

TEST_CASE("plain quadrature is exact for affine integrands") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 17);
    Field f = eval_on_grid(ExprField::parse("2*x + 1"), g);
    CHECK(integrate(f) == doctest::Approx(2.0));

    auto g2 = build_grid(Domain::rectangle(0.0, 1.0, 0.0, 2.0), 9);
    Field f2 = eval_on_grid(ExprField::parse("x + y"), g2);
    CHECK(integrate(f2) == doctest::Approx(3.0));
}

TEST_CASE("weighted quadrature handles integrable singularities") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 33);
    Field one(g, 1.0);
    Field w(g, -0.5);
    // int_0^1 d(x)^(-1/2) dx = 2 * int_0^(1/2) s^(-1/2) ds = 2*sqrt(2)
    CHECK(integrate(one, w) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
    Field wbad(g, -1.0);
    CHECK_THROWS_AS(integrate(one, wbad), QuadratureError);
}

TEST_CASE("2d weighted quadrature converges to the exact strip integral") {
    // int over the unit square of d^(-1/2): by symmetry, 4 triangles;
    // exact value 4 * int_0^(1/2) s^(-1/2) (1-2s) ds = (8/3)*sqrt(2).
    const double exact = 8.0 / 3.0 * std::sqrt(2.0);
    auto g = build_grid(Domain::rectangle(0.0, 1.0, 0.0, 1.0), 65);
    Field one(g, 1.0);
    Field w(g, -0.5);
    CHECK(integrate(one, w) == doctest::Approx(exact).epsilon(1e-2));
}

TEST_CASE("singular rhs assembles a finite load that scales with the mesh") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 65);
    Field base(g, g.dist);
    Field gamma(g, -0.7);
    Rhs rhs = Rhs::singular_power(g, base, gamma, 1.0, 0.1);
    auto b = assemble_load(g, rhs);
    CHECK(b.allFinite());
    // total load approximates int d^(-0.7) = 2/(0.3) * (1/2)^0.3; the
    // strip part is exact, the off-strip part is trapezoidal (O(h^2))
    double total = b.sum();
    double exact = 2.0 / 0.3 * std::pow(0.5, 0.3);
    CHECK(total == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("nodal volumes sum to the measure of the domain") {
    auto g = build_grid(Domain::interval(0.0, 1.0), 9);
    CHECK(nodal_volumes(g).sum() == doctest::Approx(1.0));
    auto g2 = build_grid(Domain::rectangle(0.0, 2.0, 0.0, 1.0), 9);
    CHECK(nodal_volumes(g2).sum() == doctest::Approx(2.0));
}

TEST_CASE("degenerate domains are rejected") {
    CHECK_THROWS_AS(Domain::interval(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(Domain::rectangle(0.0, 1.0, 2.0, 2.0), DomainError);
    CHECK_THROWS_AS(Domain::disk(0.0, 0.0, 0.0), DomainError);
    auto d = Domain::interval(0.0, 1.0);
    CHECK_THROWS_AS(build_grid(d, 2), DomainError);
}
