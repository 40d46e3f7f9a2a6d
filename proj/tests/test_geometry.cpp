#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "msgr/msgr.hpp"
#include "oracle.hpp"

using namespace msgr;

namespace {

double max_abs4(const Mat4<double>& m) {
  double v = 0.0;
  for (const auto& row : m)
    for (double x : row) v = std::max(v, std::abs(x));
  return v;
}

CurvatureSuite suite_at(const std::string& metric, const BasePoint& x) {
  return einstein_suite(eh_point_at(resolve_metric(metric), x).truncated(2));
}

}  // namespace

TEST(Geometry, MinkowskiInverseAndDensity) {
  const auto s = suite_at("minkowski", {0.1, 0.2, 0.3, 0.4});
  EXPECT_DOUBLE_EQ(s.rho, 1.0);
  EXPECT_DOUBLE_EQ(s.ginv[0][0], -1.0);
  EXPECT_DOUBLE_EQ(s.ginv[3][3], 1.0);
  EXPECT_EQ(max_abs4(s.ricci), 0.0);
}

TEST(Geometry, InverseOfGeneralMatrix) {
  Mat4<double> g{{{-2, 0.3, 0.1, 0}, {0.3, 1.5, 0.2, 0.1}, {0.1, 0.2, 1, 0.05}, {0, 0.1, 0.05, 3}}};
  const auto inv = inverse_and_density(g);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double v = 0.0;
      for (int c = 0; c < 4; ++c) v += g[a][c] * inv.inv[c][b];
      EXPECT_NEAR(v, a == b ? 1.0 : 0.0, 1e-15);
    }
  Eigen::Matrix4d e;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) e(a, b) = g[a][b];
  EXPECT_NEAR(inv.det, e.determinant(), 1e-14);
  EXPECT_NEAR(inv.rho, std::sqrt(std::abs(e.determinant())), 1e-14);
}

TEST(Geometry, DegenerateMetricThrows) {
  Mat4<double> g{};
  g[0][0] = -1;
  g[1][1] = 1;
  g[2][2] = 1;
  EXPECT_THROW(inverse_and_density(g), DegenerateMetricError);
}

TEST(Geometry, SchwarzschildConnection) {
  // m = 1, r = 3, equatorial plane
  const auto s = suite_at("schwarzschild", {0, 3, std::numbers::pi / 2, 0});
  EXPECT_NEAR(s.rho, 9.0, 1e-13);
  EXPECT_NEAR(s.gamma[gidx(1, 0, 0)], 1.0 / 27.0, 1e-15);  // (m/r^2)(1 - 2m/r)
  EXPECT_NEAR(s.gamma[gidx(0, 0, 1)], 1.0 / 3.0, 1e-15);   // m / (r^2 (1 - 2m/r))
  EXPECT_NEAR(s.gamma[gidx(0, 1, 0)], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.gamma[gidx(2, 1, 2)], 1.0 / 3.0, 1e-15);   // 1/r
  EXPECT_NEAR(s.gamma[gidx(1, 1, 1)], -1.0 / 3.0, 1e-15);  // -m / (r^2 (1 - 2m/r))
  EXPECT_LT(max_abs4(s.ricci), 1e-14);
  EXPECT_LT(std::abs(s.scalar), 1e-14);
}

TEST(Geometry, SphericalChartOfFlatSpace) {
  const double r = 2.0, th = 1.0;
  const auto s = suite_at("spherical-flat", {0, r, th, 0});
  EXPECT_NEAR(s.gamma[gidx(1, 2, 2)], -r, 1e-14);
  EXPECT_NEAR(s.gamma[gidx(1, 3, 3)], -r * std::sin(th) * std::sin(th), 1e-14);
  EXPECT_NEAR(s.gamma[gidx(3, 2, 3)], std::cos(th) / std::sin(th), 1e-14);
  EXPECT_NEAR(s.gamma[gidx(2, 3, 3)], -std::sin(th) * std::cos(th), 1e-14);
  EXPECT_LT(max_abs4(s.ricci), 1e-14);
}

TEST(Geometry, FlrwEinsteinTensor) {
  // a = 1 + 0.1 t at t = 0: G_00 = 3 (a'/a)^2, G_11 = -(2 a a'' + a'^2), R = 6 (a''/a + a'^2/a^2)
  const auto s = suite_at("flrw", {0, 0.2, -0.3, 0.5});
  EXPECT_NEAR(s.einstein_lower[0][0], 0.03, 1e-15);
  EXPECT_NEAR(s.einstein_lower[1][1], -0.01, 1e-15);
  EXPECT_NEAR(s.einstein_lower[0][1], 0.0, 1e-16);
  EXPECT_NEAR(s.scalar, 0.06, 1e-15);
  EXPECT_NEAR(s.einstein_upper[0][0], 0.03, 1e-15);
}

TEST(Geometry, DeSitterIsEinsteinSpace) {
  // R_ab = 3 H^2 g_ab for the flat slicing with a = exp(H t).
  const double H = 0.5;
  const auto s = suite_at("desitter", {0.4, 0, 0, 0});
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(s.ricci[a][b], 3 * H * H * s.g[a][b], 1e-14);
  EXPECT_NEAR(s.scalar, 12 * H * H, 1e-14);
}

TEST(Geometry, ContractedBianchiIdentity) {
  // nabla_a G^a_b = 0 for a non-vacuum metric, using series for the derivatives.
  const auto spec = resolve_metric("kasner:p1=0.5,p2=0.3,p3=0.1");
  const auto series = metric_jet_at(spec, BasePoint{1.3, 0.2, 0.4, -0.1}, 4);
  const auto t = metric_tensors(series);
  const auto c = curvature<JetScalar>(t.g, t.dg, t.d2g);
  const auto G = einstein_lower(t.g, c.ricci, c.scalar);
  const JetScalar zero = zero_like(c.scalar);
  Mat4<JetScalar> mixed;  // G^a_b
  for (auto& row : mixed) row.fill(zero);
  for (int a = 0; a < 4; ++a)
    for (int bb = 0; bb < 4; ++bb)
      for (int k = 0; k < 4; ++k) mixed[a][bb] += c.inverse.inv[a][k] * G[k][bb];
  EXPECT_GT(std::abs(mixed[0][0].value()), 1e-3);  // genuinely non-vacuum
  for (int bb = 0; bb < 4; ++bb) {
    double div = 0.0;
    for (int a = 0; a < 4; ++a) {
      div += series_partial(mixed[a][bb], a).value();
      for (int k = 0; k < 4; ++k) {
        div += c.gamma[gidx(a, a, k)].value() * mixed[k][bb].value();
        div -= c.gamma[gidx(k, a, bb)].value() * mixed[a][k].value();
      }
    }
    EXPECT_NEAR(div, 0.0, 1e-12) << "component " << bb;
  }
}

TEST(Geometry, LeviCivitaSeriesMatchesPointwiseConnection) {
  const auto spec = resolve_metric("schwarzschild");
  const BasePoint x{0.1, 4.0, 1.1, 0.2};
  const auto gamma = levi_civita_series(metric_jet_at(spec, x, 4));
  const auto s = einstein_suite(eh_point_at(spec, x).truncated(2));
  ASSERT_EQ(gamma.size(), 64u);
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        EXPECT_NEAR(gamma[gidx(l, m, n)].value(), s.gamma[gidx(l, m, n)], 1e-14);
        for (int t = 0; t < 4; ++t) {
          MultiIndex mi{};
          mi.e[t] = 1;
          EXPECT_NEAR(gamma[gidx(l, m, n)].derivative(mi), s.dgamma[dgidx(l, m, n, t)], 1e-13);
        }
      }
}

TEST(Geometry, AgreesWithFiniteDifferenceOracle) {
  for (const auto& b : builtin_metrics()) {
    const auto spec = b.make({});
    const BasePoint x{spec.box[0][0] * 0.3 + spec.box[0][1] * 0.7, spec.box[1][0] * 0.6 + spec.box[1][1] * 0.4,
                      spec.box[2][0] * 0.5 + spec.box[2][1] * 0.5, spec.box[3][0] * 0.2 + spec.box[3][1] * 0.8};
    const auto ours = einstein_suite(eh_point_at(spec, x).truncated(2));
    const auto ref = oracle::curvature_at(
        [&](const oracle::Point& y) {
          const auto g = spec.metric_value(y);
          oracle::Matrix m;
          for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) m(a, c) = g[a][c];
          return m;
        },
        x);
    EXPECT_LT(oracle::relative_gap(ours.gamma, ref.gamma), 1e-5) << b.name;
    EXPECT_LT(oracle::relative_gap(oracle::flatten_rows(ours.ricci), oracle::flatten(ref.ricci)), 1e-5) << b.name;
    EXPECT_LT(oracle::relative_gap(oracle::flatten_rows(ours.einstein_lower), oracle::flatten(ref.einstein)), 1e-5)
        << b.name;
    EXPECT_NEAR(ours.scalar, ref.scalar, 1e-5 * (1 + std::abs(ref.scalar))) << b.name;
  }
}

TEST(Geometry, TorsionOfAsymmetricConnection) {
  std::vector<double> gamma(64, 0.0);
  gamma[gidx(1, 0, 2)] = 1.0;
  gamma[gidx(3, 2, 1)] = 0.5;
  gamma[gidx(3, 1, 2)] = 0.5;
  const auto t = torsion<double>(gamma);
  EXPECT_DOUBLE_EQ(t[gidx(1, 0, 2)], 1.0);
  EXPECT_DOUBLE_EQ(t[gidx(1, 2, 0)], -1.0);
  EXPECT_DOUBLE_EQ(t[gidx(3, 1, 2)], 0.0);
  const auto c = torsion_components(gamma);
  // a-major, then pairs (01) (02) (03) (12) (13) (23)
  EXPECT_DOUBLE_EQ(c[6 + 1], 1.0);
  double sum = 0.0;
  for (double v : c) sum += std::abs(v);
  EXPECT_DOUBLE_EQ(sum, 1.0);
}
