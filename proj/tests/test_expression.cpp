#include <gtest/gtest.h>

#include <cmath>

#include "msgr/expression.hpp"

using namespace msgr;

namespace {

double eval(const std::string& text, std::array<double, 4> x = {0, 0, 0, 0}, std::map<std::string, double> params = {}) {
  std::set<std::string> names;
  for (const auto& [k, v] : params) names.insert(k);
  return parse_expression(text, names).evaluate<double>(x, params);
}

std::size_t error_offset(const std::string& text, const std::set<std::string>& params = {}) {
  try {
    (void)parse_expression(text, params);
  } catch (const ParseError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no parse error for '" << text << "'";
  return 0;
}

}  // namespace

TEST(ExpressionParser, Precedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("10 - 4 - 3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
  EXPECT_DOUBLE_EQ(eval("3 * -x1", {0, 2, 0, 0}), -6.0);
  EXPECT_DOUBLE_EQ(eval("2 * x0^2 + x1 / x2 - x3", {3, 1, 4, 0.5}), 17.75);
}

TEST(ExpressionParser, FunctionsAndConstants) {
  EXPECT_NEAR(eval("sin(x0)^2 + cos(x0)^2", {0.77, 0, 0, 0}), 1.0, 1e-15);
  EXPECT_NEAR(eval("exp(ln(x1))", {0, 2.5, 0, 0}), 2.5, 1e-15);
  EXPECT_NEAR(eval("sqrt(16)"), 4.0, 0.0);
  EXPECT_NEAR(eval("cos(pi)"), -1.0, 1e-15);
  EXPECT_DOUBLE_EQ(eval("1.5e2 + .5"), 150.5);
}

TEST(ExpressionParser, Parameters) {
  EXPECT_DOUBLE_EQ(eval("-(1 - 2*m/x1)", {0, 4, 0, 0}, {{"m", 1.0}}), -0.5);
  const auto e = parse_expression("a0 + adot*x0", {"a0", "adot"});
  EXPECT_EQ(e.parameters(), (std::set<std::string>{"a0", "adot"}));
  EXPECT_THROW(e.evaluate<double>({0, 0, 0, 0}, {{"a0", 1.0}}), ConfigError);
}

TEST(ExpressionParser, PrintedFormParsesBackToSameTree) {
  for (const std::string text : {"-(1-2*m/x1)", "x1^2*sin(x2)^2", "exp(2*p1*ln(x0)) - 1e-3/3", "2^-3 + -x0^4",
                                 "sqrt(1 + x2*x2)/cos(pi/7)"}) {
    const std::set<std::string> params{"m", "p1"};
    const auto a = parse_expression(text, params);
    const auto b = parse_expression(a.to_string(), params);
    EXPECT_TRUE(a == b) << text << " -> " << a.to_string();
    EXPECT_EQ(a.to_string(), b.to_string());
  }
  EXPECT_EQ(parse_expression("x1^2 - 0.1").to_string(), "((x1 ^ 2) - 0.10000000000000001)");
}

TEST(ExpressionParser, ErrorsCarryByteOffsets) {
  EXPECT_EQ(error_offset("x0 + y"), 5u);
  EXPECT_EQ(error_offset("x0 +"), 4u);
  EXPECT_EQ(error_offset("(x0 + 1"), 7u);
  EXPECT_EQ(error_offset("x0 ^ 0.5"), 4u);
  EXPECT_EQ(error_offset("x0 ^ x1"), 5u);
  EXPECT_EQ(error_offset("x4"), 0u);
  EXPECT_EQ(error_offset("1 + $"), 4u);
  EXPECT_EQ(error_offset("x0 x1"), 3u);
  EXPECT_EQ(error_offset("sin x0"), 4u);
  try {
    (void)parse_expression("x0 + q");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown identifier 'q'"), std::string::npos);
  }
}

TEST(ExpressionEvaluator, SingularitiesThrow) {
  EXPECT_THROW(eval("1/x0"), SingularPointError);
  EXPECT_THROW(eval("sqrt(x0 - 1)"), SingularPointError);
  EXPECT_THROW(eval("ln(x0)"), SingularPointError);
  EXPECT_THROW(eval("x0^-2"), SingularPointError);
  EXPECT_THROW(eval("exp(1000)"), SingularPointError);
  EXPECT_THROW(eval("1/(x0 - 1)", {1, 0, 0, 0}), SingularPointError);
}

TEST(ExpressionEvaluator, SeriesEvaluationMatchesPointwise) {
  const std::set<std::string> names{"m"};
  const std::map<std::string, double> params{{"m", 1.0}};
  const auto e = parse_expression("x1^2*sin(x2)^2/(1 - 2*m/x1) + exp(x0*x3)", names);
  const BasePoint b{0.3, 4.0, 1.1, -0.2};
  const auto s = e.evaluate<JetScalar>(coordinate_series(b, 3), params);
  EXPECT_NEAR(s.value(), e.evaluate<double>(b, params), 1e-13);
  const double h = 1e-5;
  for (int i = 0; i < 4; ++i) {
    BasePoint p = b, q = b;
    p[static_cast<std::size_t>(i)] += h;
    q[static_cast<std::size_t>(i)] -= h;
    MultiIndex mi{};
    mi.e[static_cast<std::size_t>(i)] = 1;
    EXPECT_NEAR(s.derivative(mi), (e.evaluate<double>(p, params) - e.evaluate<double>(q, params)) / (2 * h), 1e-7);
  }
}

TEST(ExpressionEvaluator, ZeroConstant) {
  EXPECT_TRUE(Expression::constant(0.0).is_zero_constant());
  EXPECT_TRUE(parse_expression("0").is_zero_constant());
  EXPECT_FALSE(parse_expression("0*x0").is_zero_constant());
}
