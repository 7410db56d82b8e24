#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "grwlab/errors.hpp"
#include "grwlab/expression.hpp"
#include "grwlab/jet.hpp"

namespace grwlab {
namespace {

TEST(Jet, ProductAndQuotientRules) {
  const Jet t = Jet::variable(0.7);
  const Jet q = (t * t + Jet(1.0)) / (t + Jet(2.0));
  // q = (t^2+1)/(t+2); q' = (t^2+4t-1)/(t+2)^2; q'' = 10/(t+2)^3.
  const double d = 0.7 + 2.0;
  EXPECT_NEAR(q.v, (0.49 + 1.0) / d, 1e-15);
  EXPECT_NEAR(q.d1, (0.49 + 2.8 - 1.0) / (d * d), 1e-15);
  EXPECT_NEAR(q.d2, 10.0 / (d * d * d), 1e-14);
}

TEST(Jet, ElementaryFunctions) {
  const Jet t = Jet::variable(0.3);
  const Jet s = sqrt(t);
  EXPECT_NEAR(s.d2, -0.25 * std::pow(0.3, -1.5), 1e-13);
  const Jet l = log(t);
  EXPECT_NEAR(l.d2, -1.0 / 0.09, 1e-12);
  const Jet p = pow(t, 2.0 / 3.0);
  EXPECT_NEAR(p.d2, (2.0 / 3.0) * (-1.0 / 3.0) * std::pow(0.3, -4.0 / 3.0), 1e-12);
  const Jet c = cos(t);
  EXPECT_NEAR(c.d2, -std::cos(0.3), 1e-15);
}

TEST(Expression, PrecedenceAndUnaryMinus) {
  const auto e = Expression::parse("-t^2 + 2*t - 3/4");
  EXPECT_DOUBLE_EQ(e.evaluate(Jet(3.0)).v, -9.0 + 6.0 - 0.75);
  const auto r = Expression::parse("2^3^2");
  EXPECT_DOUBLE_EQ(r.evaluate(Jet(0.0)).v, 512.0);
}

TEST(Expression, DerivativesMatchClosedForm) {
  const auto e = Expression::parse("exp(-t^2)");
  const Jet v = e.evaluate(Jet::variable(0.5));
  const double f = std::exp(-0.25);
  EXPECT_NEAR(v.v, f, 1e-16);
  EXPECT_NEAR(v.d1, -1.0 * f, 1e-15);
  EXPECT_NEAR(v.d2, (4.0 * 0.25 - 2.0) * f, 1e-15);
}

TEST(Expression, FunctionsAndConstants) {
  const auto e = Expression::parse("pow(t, 0.5) * sqrt(4) + sin(pi/2) + log(e) + cos(0)");
  EXPECT_NEAR(e.evaluate(Jet(9.0)).v, 6.0 + 1.0 + 1.0 + 1.0, 1e-14);
}

TEST(Expression, MultipleVariables) {
  const auto e = Expression::parse("0.2*sin(pi*x1/2)*sin(pi*x2/2)", {"x1", "x2"});
  const std::vector<double> x{1.0, -1.0};
  EXPECT_NEAR(e.evaluate_plain(x), -0.2, 1e-15);
}

TEST(Expression, RejectsMalformedInput) {
  EXPECT_THROW(Expression::parse("t +"), ParseError);
  EXPECT_THROW(Expression::parse("foo(t)"), ParseError);
  EXPECT_THROW(Expression::parse("x"), ParseError);
  EXPECT_THROW(Expression::parse("(t"), ParseError);
  EXPECT_THROW(Expression::parse("t t"), ParseError);
}

}  // namespace
}  // namespace grwlab
