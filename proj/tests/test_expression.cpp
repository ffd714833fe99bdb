#include <doctest.h>

#include <cmath>
#include <random>

#include "act/errors.hpp"
#include "act/expression.hpp"

using namespace act;

TEST_CASE("expression evaluation") {
  CHECK(parse_expression("1+2*3^2").eval(0.0) == doctest::Approx(19.0));
  CHECK(parse_expression("2^3^2").eval(0.0) == doctest::Approx(512.0));  // right assoc
  CHECK(parse_expression("-t^2").eval(3.0) == doctest::Approx(-9.0));   // ^ binds tighter
  CHECK(parse_expression("2*-3").eval(0.0) == doctest::Approx(-6.0));
  CHECK(parse_expression("sin(20*t)*cos(2*t)").eval(0.0) == doctest::Approx(0.0));
  CHECK(parse_expression("15*sin(2*pi*t/1)+0.5").eval(0.25) == doctest::Approx(15.5));
  CHECK(parse_expression("e^t").eval(1.0) == doctest::Approx(M_E));
  CHECK(parse_expression("sqrt(tanh(0)+4)").eval(0.0) == doctest::Approx(2.0));
  CHECK(parse_expression("cosh(t)^2 - sinh(t)^2").eval(0.7) == doctest::Approx(1.0));
  CHECK(parse_expression("  ( t + 1 ) / 2 ").eval(3.0) == doctest::Approx(2.0));
}

TEST_CASE("symbolic derivatives") {
  CHECK(parse_expression("sin(20*t)*cos(2*t)").derivative().eval(0.0) ==
        doctest::Approx(20.0));
  CHECK(parse_expression("t^3").derivative().eval(2.0) == doctest::Approx(12.0));
  CHECK(parse_expression("exp(-t)").derivative().eval(1.0) ==
        doctest::Approx(-std::exp(-1.0)));
  // Non-constant exponent uses the general rule.
  CHECK(parse_expression("t^t").derivative().eval(2.0) ==
        doctest::Approx(4.0 * (std::log(2.0) + 1.0)));
  // Second derivative chains.
  CHECK(parse_expression("sin(3*t)").derivative().derivative().eval(0.5) ==
        doctest::Approx(-9.0 * std::sin(1.5)));

  SUBCASE("matches central differences at random points") {
    const char* exprs[] = {"sin(20*t)*cos(2*t)", "exp(-t/2)*sinh(t)", "t^2/(1+t^2)",
                           "tanh(3*t)+sqrt(t+2)", "cosh(t/4)^3"};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    for (const char* text : exprs) {
      const Expression f = parse_expression(text);
      const Expression df = f.derivative();
      for (int k = 0; k < 50; ++k) {
        const double t = dist(rng);
        const double h = 1e-6;
        const double fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(fd));
        CHECK(std::abs(df.eval(t) - fd) < 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_expression("1+"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("sin 3"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("(1+2"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("1+2)"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("foo(3)"), UnknownIdentifier);
  CHECK_THROWS_AS(parse_expression("x+1"), UnknownIdentifier);
  CHECK_THROWS_AS(parse_expression(std::string(5000, '1')), SyntaxError);

  SUBCASE("byte offsets point at the failure") {
    try {
      parse_expression("1 + * 2");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.offset == 4);
    }
  }
}
