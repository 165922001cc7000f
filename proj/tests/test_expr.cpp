#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plx/domain.hpp"
#include "plx/expr.hpp"

using plx::EvalPoint;
using plx::ExprField;

static double ev(const std::string& s, double x = 0.0, double y = 0.0, double d = 0.0) {
    return ExprField::parse(s).eval(EvalPoint{x, y, d});
}

TEST_CASE("precedence and associativity") {
    CHECK(ev("2+3*4^2") == doctest::Approx(50.0));
    CHECK(ev("-2^2") == doctest::Approx(-4.0));
    CHECK(ev("2^3^2") == doctest::Approx(512.0));  // right-associative
    CHECK(ev("10-4-3") == doctest::Approx(3.0));
    CHECK(ev("12/4/3") == doctest::Approx(1.0));
    CHECK(ev("(2+3)*4") == doctest::Approx(20.0));
    CHECK(ev("2*-3") == doctest::Approx(-6.0));
}

TEST_CASE("variables, functions, constants") {
    CHECK(ev("x + 2*y + d", 1.0, 2.0, 3.0) == doctest::Approx(8.0));
    CHECK(ev("sin(pi/2)") == doctest::Approx(1.0));
    CHECK(ev("cos(0)") == doctest::Approx(1.0));
    CHECK(ev("exp(1)") == doctest::Approx(std::exp(1.0)));
    CHECK(ev("log(exp(2))") == doctest::Approx(2.0));
    CHECK(ev("abs(-3.5)") == doctest::Approx(3.5));
    CHECK(ev("min(2, 5)") == doctest::Approx(2.0));
    CHECK(ev("max(2, 5)") == doctest::Approx(5.0));
    CHECK(ev("2 + 0.5*sin(pi*x)", 0.5) == doctest::Approx(2.5));
    CHECK(ExprField::parse("x + 0*y").uses_y());
    CHECK_FALSE(ExprField::parse("x + d").uses_y());
}

TEST_CASE("parse errors carry an offset") {
    CHECK_THROWS_AS(ExprField::parse("2 +"), plx::ParseError);
    CHECK_THROWS_AS(ExprField::parse("sin()"), plx::ParseError);
    CHECK_THROWS_AS(ExprField::parse("2 * * 3"), plx::ParseError);
    CHECK_THROWS_AS(ExprField::parse("foo(2)"), plx::ParseError);
    CHECK_THROWS_AS(ExprField::parse("(1+2"), plx::ParseError);
    CHECK_THROWS_AS(ExprField::parse(""), plx::ParseError);
    try {
        ExprField::parse("1 + bogus");
    } catch (const plx::ParseError& e) {
        CHECK(e.offset == 4);
    }
}

TEST_CASE("evaluation errors on non-finite results") {
    CHECK_THROWS_AS(ev("1/x", 0.0), plx::EvalError);
    CHECK_THROWS_AS(ev("log(0)"), plx::EvalError);
    CHECK_THROWS_AS(ev("log(-1)"), plx::EvalError);
    CHECK_THROWS_AS(ev("(-2)^0.5"), plx::EvalError);
    CHECK_THROWS_AS(ev("0^(-1)"), plx::EvalError);
    CHECK(ev("(-2)^3") == doctest::Approx(-8.0));
    CHECK(ev("d^(-0.5)", 0.0, 0.0, 4.0) == doctest::Approx(0.5));
}

TEST_CASE("print round-trips") {
    for (const char* src : {"2+3*4^2", "-2^2", "min(x, max(y, d))",
                            "2.5 + 0.2*sin(pi*x)", "-0.3 - 0.1*x",
                            "exp(-abs(x-0.5))/(1+y^2)"}) {
        ExprField e = ExprField::parse(src);
        ExprField r = ExprField::parse(e.print());
        for (double x : {0.1, 0.37, 0.9})
            for (double y : {0.0, 0.6}) {
                EvalPoint pt{x, y, 0.25};
                CHECK(e.eval(pt) == doctest::Approx(r.eval(pt)).epsilon(1e-14));
            }
    }
}

TEST_CASE("range on grid with aliasing probe") {
    auto dom = plx::Domain::interval(0.0, 1.0);
    auto g = plx::build_grid(dom, 9);
    auto e = ExprField::parse("2 + 0.5*sin(pi*x)");
    auto r = plx::range_on_grid(e, g);
    CHECK(r.inf == doctest::Approx(2.0));
    CHECK(r.sup == doctest::Approx(2.5));
    CHECK(r.argmin >= 0);
    CHECK(r.argmax >= 0);
    CHECK_FALSE(r.aliasing_warning);

    // A high-frequency expression that vanishes on every node of the
    // coarse grid but not between them must trip the probe.
    auto bad = ExprField::parse("sin(8*pi*x)");
    auto rb = plx::range_on_grid(bad, g);
    CHECK(rb.aliasing_warning);
}

TEST_CASE("constant fields") {
    auto c = ExprField::constant(3.25);
    CHECK(c.eval({}) == doctest::Approx(3.25));
    CHECK_FALSE(c.uses_y());
}
