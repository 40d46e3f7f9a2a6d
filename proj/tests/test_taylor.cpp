#include <gtest/gtest.h>

#include <cmath>

#include "msgr/dual.hpp"
#include "msgr/taylor.hpp"

using msgr::BasePoint;
using msgr::JetScalar;
using msgr::MultiIndex;

namespace {

MultiIndex mi(int a, int b, int c, int d) { return MultiIndex{{a, b, c, d}}; }

const BasePoint kOrigin{0, 0, 0, 0};

}  // namespace

TEST(TaylorSeries, MonomialCountsMatchBinomials) {
  // C(k + 4, 4) monomials of degree <= k in four variables.
  EXPECT_EQ(msgr::detail::monomial_count(0), 1);
  EXPECT_EQ(msgr::detail::monomial_count(1), 5);
  EXPECT_EQ(msgr::detail::monomial_count(2), 15);
  EXPECT_EQ(msgr::detail::monomial_count(4), 70);
  EXPECT_EQ(msgr::detail::monomial_count(6), 210);
  EXPECT_EQ(JetScalar(4, kOrigin).size(), 70u);
}

TEST(TaylorSeries, SquareRootOfLinearFunction) {
  // sqrt(1 + u), u = 2 y: 1 + y - y^2/2 + y^3/2 - 5 y^4/8
  const auto y = JetScalar::variable(2, kOrigin, 4);
  const auto s = sqrt(1.0 + 2.0 * y);
  EXPECT_DOUBLE_EQ(s.coeff(mi(0, 0, 0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(s.coeff(mi(0, 0, 1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(s.coeff(mi(0, 0, 2, 0)), -0.5);
  EXPECT_DOUBLE_EQ(s.coeff(mi(0, 0, 3, 0)), 0.5);
  EXPECT_DOUBLE_EQ(s.coeff(mi(0, 0, 4, 0)), -0.625);
  EXPECT_DOUBLE_EQ(s.coeff(mi(1, 0, 1, 0)), 0.0);
}

TEST(TaylorSeries, ProductTruncatesExactly) {
  const auto x = JetScalar::variable(0, kOrigin, 3);
  const auto p = (1.0 + x) * (1.0 - x);
  EXPECT_DOUBLE_EQ(p.coeff(mi(0, 0, 0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(p.coeff(mi(1, 0, 0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(p.coeff(mi(2, 0, 0, 0)), -1.0);
  EXPECT_DOUBLE_EQ(p.coeff(mi(3, 0, 0, 0)), 0.0);
}

TEST(TaylorSeries, GeometricSeriesFromReciprocal) {
  const auto x = JetScalar::variable(1, kOrigin, 5);
  const auto r = 1.0 / (1.0 - x);
  for (int k = 0; k <= 5; ++k) EXPECT_DOUBLE_EQ(r.coeff(mi(0, k, 0, 0)), 1.0) << "degree " << k;
}

TEST(TaylorSeries, ExponentialOfSumFactorizes) {
  const auto x = msgr::coordinate_series(kOrigin, 4);
  const auto e = exp(x[0] + x[1]);
  EXPECT_DOUBLE_EQ(e.coeff(mi(2, 1, 0, 0)), 0.5);
  EXPECT_DOUBLE_EQ(e.coeff(mi(1, 3, 0, 0)), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(e.coeff(mi(2, 2, 0, 0)), 0.25);
  EXPECT_DOUBLE_EQ(e.derivative(mi(2, 2, 0, 0)), 1.0);
}

TEST(TaylorSeries, PythagoreanIdentityHoldsToEveryOrder) {
  const BasePoint b{0.3, -0.7, 1.1, 0.2};
  const auto x = msgr::coordinate_series(b, 5);
  const auto u = x[0] * x[1] + x[2];
  const auto one = sin(u) * sin(u) + cos(u) * cos(u);
  EXPECT_NEAR(one.value(), 1.0, 1e-15);
  for (std::size_t i = 1; i < one.size(); ++i) EXPECT_NEAR(one.coefficients()[i], 0.0, 1e-14);
}

TEST(TaylorSeries, LogInvertsExp) {
  const BasePoint b{0.5, 0.25, 0, 0};
  const auto x = msgr::coordinate_series(b, 4);
  const auto f = x[0] * x[0] + 3.0 * x[1];
  const auto g = log(exp(f));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g.coefficients()[i], f.coefficients()[i], 1e-13);
}

TEST(TaylorSeries, LeibnizMixedDerivative) {
  // f = x0^2 x1 at (1, 2): f_01 = 2 x0 = 2, f_00 = 2 x1 = 4, f_001 = 2.
  const BasePoint b{1, 2, 0, 0};
  const auto x = msgr::coordinate_series(b, 4);
  const auto f = x[0] * x[0] * x[1];
  EXPECT_DOUBLE_EQ(f.value(), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative(mi(1, 1, 0, 0)), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative(mi(2, 0, 0, 0)), 4.0);
  EXPECT_DOUBLE_EQ(f.derivative(mi(2, 1, 0, 0)), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative(mi(3, 0, 0, 0)), 0.0);
}

TEST(TaylorSeries, IntegerPowerMatchesRepeatedProduct) {
  const BasePoint b{0.4, 0, 0, 0};
  const auto x = msgr::coordinate_series(b, 4);
  const auto a = pow(1.0 + x[0], 3);
  const auto c = (1.0 + x[0]) * (1.0 + x[0]) * (1.0 + x[0]);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.coefficients()[i], c.coefficients()[i], 1e-15);
  const auto inv = pow(1.0 + x[0], -2) * pow(1.0 + x[0], 2);
  EXPECT_NEAR(inv.value(), 1.0, 1e-15);
  EXPECT_NEAR(inv.derivative(mi(1, 0, 0, 0)), 0.0, 1e-14);
}

TEST(TaylorSeries, PartialDerivativeDropsOneOrder) {
  const BasePoint b{2, 0, 0, 0};
  const auto x = msgr::coordinate_series(b, 4);
  const auto f = x[0] * x[0] * x[0];
  const auto df = series_partial(f, 0);
  EXPECT_EQ(df.order(), 3);
  EXPECT_DOUBLE_EQ(df.value(), 12.0);
  EXPECT_DOUBLE_EQ(df.derivative(mi(1, 0, 0, 0)), 12.0);
  EXPECT_DOUBLE_EQ(df.derivative(mi(2, 0, 0, 0)), 6.0);
}

TEST(TaylorSeries, MatchesFiniteDifferences) {
  // f = sin(x0) exp(x1 x2) / (2 + x3): compare first and second derivatives
  // with central differences.
  const BasePoint b{0.3, 0.4, -0.6, 0.5};
  auto f = [](const BasePoint& p) { return std::sin(p[0]) * std::exp(p[1] * p[2]) / (2.0 + p[3]); };
  const auto x = msgr::coordinate_series(b, 3);
  const auto s = sin(x[0]) * exp(x[1] * x[2]) / (2.0 + x[3]);
  const double h = 1e-4;
  for (int i = 0; i < 4; ++i) {
    BasePoint p = b, q = b;
    p[static_cast<std::size_t>(i)] += h;
    q[static_cast<std::size_t>(i)] -= h;
    MultiIndex m{};
    m.e[static_cast<std::size_t>(i)] = 1;
    EXPECT_NEAR(s.derivative(m), (f(p) - f(q)) / (2 * h), 1e-7);
    MultiIndex m2{};
    m2.e[static_cast<std::size_t>(i)] = 2;
    EXPECT_NEAR(s.derivative(m2), (f(p) - 2 * f(b) + f(q)) / (h * h), 1e-5);
  }
}

TEST(TaylorSeries, RejectsMixedOperands) {
  const auto a = JetScalar::variable(0, kOrigin, 3);
  const auto b = JetScalar::variable(0, BasePoint{1, 0, 0, 0}, 3);
  const auto c = JetScalar::variable(0, kOrigin, 2);
  EXPECT_THROW((void)(a + b), msgr::UsageError);
  EXPECT_THROW((void)(a * c), msgr::UsageError);
  EXPECT_THROW(JetScalar(7, kOrigin), msgr::UsageError);
  EXPECT_THROW((void)a.truncated(4), msgr::UsageError);
}

TEST(TaylorSeries, SingularOperationsThrow) {
  const auto x = JetScalar::variable(0, kOrigin, 3);
  EXPECT_THROW((void)(1.0 / x), msgr::SingularPointError);
  EXPECT_THROW((void)sqrt(x - 1.0), msgr::SingularPointError);
  EXPECT_THROW((void)log(x), msgr::SingularPointError);
  EXPECT_THROW((void)series_partial(JetScalar(0, kOrigin), 0), msgr::UsageError);
}

TEST(DualNumbers, ProductAndQuotientRules) {
  using D = msgr::Dual<double, 2>;
  D x(3.0), y(2.0);
  x.set_tangent(0, 1.0);
  y.set_tangent(1, 1.0);
  const D f = x * x * y / (1.0 + y);  // 9 * 2 / 3 = 6
  EXPECT_DOUBLE_EQ(f.value(), 6.0);
  EXPECT_DOUBLE_EQ(f.tangent(0), 2.0 * 3.0 * 2.0 / 3.0);  // 2 x y / (1 + y)
  EXPECT_DOUBLE_EQ(f.tangent(1), 9.0 / 9.0);               // x^2 / (1 + y)^2
}

TEST(DualNumbers, NestedGivesSecondDerivative) {
  using D1 = msgr::Dual<double, 1>;
  using D2 = msgr::Dual<D1, 1>;
  // f = x^3 sqrt(x) at x = 4: f' = 3.5 x^2.5 = 112, f'' = 8.75 x^1.5 = 70
  D1 inner(4.0);
  inner.set_tangent(0, 1.0);
  D2 x(inner);
  x.set_tangent(0, D1(1.0));
  const D2 f = x * x * x * sqrt(x);
  EXPECT_DOUBLE_EQ(f.value().value(), 128.0);
  EXPECT_DOUBLE_EQ(f.tangent(0).value(), 112.0);
  EXPECT_DOUBLE_EQ(f.tangent(0).tangent(0), 70.0);
}

TEST(DualNumbers, InactiveValuesCarryNoTangent) {
  using D = msgr::Dual<double, 4>;
  const D c(5.0);
  EXPECT_FALSE(c.live());
  EXPECT_EQ(c.tangent(3), 0.0);
  D x(1.0);
  x.set_tangent(2, 1.0);
  const D s = c * x + c;
  EXPECT_TRUE(s.live());
  EXPECT_DOUBLE_EQ(s.tangent(2), 5.0);
  EXPECT_DOUBLE_EQ(s.tangent(0), 0.0);
}
