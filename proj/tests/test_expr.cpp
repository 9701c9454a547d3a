#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aecurv/errors.hpp"
#include "aecurv/expr.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace aecurv;

namespace {

double eval_value(const std::string& text, const std::vector<double>& x,
                  const std::map<std::string, double>& params = {}) {
    return eval_jet(parse_expr(text), x, 0, params).value();
}

} // namespace

TEST_CASE("precedence and associativity") {
    std::vector<double> x{2.0};
    CHECK(eval_value("1 + 2*3", x) == 7.0);
    CHECK(eval_value("2*3 + 1", x) == 7.0);
    CHECK(eval_value("10 - 4 - 3", x) == 3.0);
    CHECK(eval_value("24 / 4 / 2", x) == 3.0);
    CHECK(eval_value("2^3", x) == 8.0);
    CHECK(eval_value("2*x1^2", x) == 8.0);   // ^ binds tighter than *
    CHECK(eval_value("-x1^2", x) == -4.0);   // ^ binds tighter than unary -
    CHECK(eval_value("(-x1)^2", x) == 4.0);
    CHECK(eval_value("2 - -3", x) == 5.0);
}

TEST_CASE("functions and radius") {
    std::vector<double> x{3.0, 4.0};
    CHECK(eval_value("r", x) == doctest::Approx(5.0));
    CHECK(eval_value("sqrt(x1^2 + x2^2)", x) == doctest::Approx(5.0));
    CHECK(eval_value("exp(log(r))", x) == doctest::Approx(5.0));
    CHECK(eval_value("r^(-2)", x) == doctest::Approx(0.04));
    CHECK(eval_value("1 + m/(2*r)", x, {{"m", 2.0}}) == doctest::Approx(1.2));
}

TEST_CASE("jets of expressions differentiate correctly") {
    // d/dx1 of (1 + a r^-1) = -a x1 r^-3 at (3,4): -0.5 * 3 / 125
    Jet j = eval_jet(parse_expr("1 + a*r^(-1)"), std::vector<double>{3.0, 4.0}, 3,
                     {{"a", 0.5}});
    std::vector<int> e1{1, 0};
    CHECK(j.partial(e1) == doctest::Approx(-0.5 * 3.0 / 125.0).epsilon(1e-12));
    std::vector<int> e11{2, 0};
    // d2/dx1^2 = -a (r^-3 - 3 x1^2 r^-5)
    CHECK(j.partial(e11) ==
          doctest::Approx(-0.5 * (1.0 / 125.0 - 3.0 * 9.0 / 3125.0)).epsilon(1e-12));
}

TEST_CASE("pretty print round trips") {
    for (const char* s : {"1 + 0.1*r^(-1)", "(x1 + x2)^2 - sqrt(r)", "-x3/(1 + x1*x2)",
                          "exp(-r)*m", "x1^2*x2 - 7"}) {
        ExprPtr a = parse_expr(s);
        ExprPtr b = parse_expr(pretty_print(*a));
        CHECK(expr_equal(*a, *b));
    }
}

TEST_CASE("expr_equal distinguishes") {
    CHECK(expr_equal(*parse_expr("x1 + x2"), *parse_expr("x1 + x2")));
    CHECK_FALSE(expr_equal(*parse_expr("x1 + x2"), *parse_expr("x2 + x1")));
    CHECK_FALSE(expr_equal(*parse_expr("x1"), *parse_expr("x2")));
}

TEST_CASE("max_variable and contains_radius") {
    CHECK(max_variable(*parse_expr("x1 + x5*x2")) == 5);
    CHECK(max_variable(*parse_expr("1 + m")) == 0);
    CHECK(contains_radius(*parse_expr("1 + r^(-2)")));
    CHECK_FALSE(contains_radius(*parse_expr("x1 + m")));
}

TEST_CASE("parse errors carry the parse kind") {
    for (const char* bad : {"1 +", "(x1", "x1 x2", "1..2", "x0", "x9", "foo(3)", "^2", ""}) {
        try {
            parse_expr(bad);
            FAIL_CHECK("expected parse failure for: " << bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::parse);
        }
    }
}

TEST_CASE("unknown parameter fails at evaluation") {
    ExprPtr e = parse_expr("1 + m*r");
    CHECK_THROWS_AS(eval_jet(e, std::vector<double>{1.0, 2.0}, 1, {}), Error);
}

TEST_CASE("radius at the origin is a domain error") {
    ExprPtr e = parse_expr("r");
    CHECK_THROWS_AS(eval_jet(e, std::vector<double>{0.0, 0.0}, 2, {}), Error);
}

TEST_CASE("power of jets with non-integer exponent needs positive base") {
    ExprPtr e = parse_expr("x1^0.5");
    CHECK_THROWS_AS(eval_jet(e, std::vector<double>{-2.0}, 2, {}), Error);
    CHECK(eval_jet(e, std::vector<double>{4.0}, 2, {}).value() == doctest::Approx(2.0));
}
