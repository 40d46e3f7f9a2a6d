#pragma once

// Curvature of a metric and of an arbitrary linear connection at a point.
// Every routine is generic in the scalar type so the same code runs on
// doubles, on (nested) dual numbers and on truncated Taylor series.
//
// Index conventions for flat storage:
//   dg     [16 tau + 4 a + b]              d_tau g_ab
//   d2g    [64 tau + 16 kappa + 4 a + b]   d_tau d_kappa g_ab
//   gamma  [16 l + 4 m + n]                Gamma^l_mn
//   dgamma [4 (16 l + 4 m + n) + tau]      d_tau Gamma^l_mn
//   torsion[16 a + 4 b + c]                T^a_bc

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "msgr/dual.hpp"
#include "msgr/errors.hpp"
#include "msgr/indexing.hpp"
#include "msgr/jet_space.hpp"
#include "msgr/taylor.hpp"

namespace msgr {

template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;

constexpr std::size_t gidx(int l, int m, int n) { return static_cast<std::size_t>(16 * l + 4 * m + n); }
constexpr std::size_t dgidx(int l, int m, int n, int tau) { return static_cast<std::size_t>(4 * (16 * l + 4 * m + n) + tau); }
constexpr std::size_t d1idx(int tau, int a, int b) { return static_cast<std::size_t>(16 * tau + 4 * a + b); }
constexpr std::size_t d2idx(int tau, int kap, int a, int b) {
  return static_cast<std::size_t>(64 * tau + 16 * kap + 4 * a + b);
}

template <class T>
struct MetricInverse {
  Mat4<T> inv;
  T det;
  T rho;  // sqrt(|det g|)
};

inline constexpr double kDegenerateDeterminant = 1e-14;

template <class T>
MetricInverse<T> inverse_and_density(const Mat4<T>& a) {
  using std::abs;
  using std::sqrt;
  auto at = [&](int i, int j) -> const T& { return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  const T s0 = at(0, 0) * at(1, 1) - at(1, 0) * at(0, 1);
  const T s1 = at(0, 0) * at(1, 2) - at(1, 0) * at(0, 2);
  const T s2 = at(0, 0) * at(1, 3) - at(1, 0) * at(0, 3);
  const T s3 = at(0, 1) * at(1, 2) - at(1, 1) * at(0, 2);
  const T s4 = at(0, 1) * at(1, 3) - at(1, 1) * at(0, 3);
  const T s5 = at(0, 2) * at(1, 3) - at(1, 2) * at(0, 3);
  const T c5 = at(2, 2) * at(3, 3) - at(3, 2) * at(2, 3);
  const T c4 = at(2, 1) * at(3, 3) - at(3, 1) * at(2, 3);
  const T c3 = at(2, 1) * at(3, 2) - at(3, 1) * at(2, 2);
  const T c2 = at(2, 0) * at(3, 3) - at(3, 0) * at(2, 3);
  const T c1 = at(2, 0) * at(3, 2) - at(3, 0) * at(2, 2);
  const T c0 = at(2, 0) * at(3, 1) - at(3, 0) * at(2, 1);
  const T det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
  if (!(std::abs(value_of(det)) >= kDegenerateDeterminant)) {
    throw DegenerateMetricError("degenerate metric: |det g| below 1e-14");
  }
  const T inv_det = 1.0 / det;

  MetricInverse<T> r{a, det, sqrt(abs(det))};
  auto set = [&](int i, int j, const T& v) { r.inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v * inv_det; };
  set(0, 0, at(1, 1) * c5 - at(1, 2) * c4 + at(1, 3) * c3);
  set(0, 1, -(at(0, 1) * c5) + at(0, 2) * c4 - at(0, 3) * c3);
  set(0, 2, at(3, 1) * s5 - at(3, 2) * s4 + at(3, 3) * s3);
  set(0, 3, -(at(2, 1) * s5) + at(2, 2) * s4 - at(2, 3) * s3);
  set(1, 0, -(at(1, 0) * c5) + at(1, 2) * c2 - at(1, 3) * c1);
  set(1, 1, at(0, 0) * c5 - at(0, 2) * c2 + at(0, 3) * c1);
  set(1, 2, -(at(3, 0) * s5) + at(3, 2) * s2 - at(3, 3) * s1);
  set(1, 3, at(2, 0) * s5 - at(2, 2) * s2 + at(2, 3) * s1);
  set(2, 0, at(1, 0) * c4 - at(1, 1) * c2 + at(1, 3) * c0);
  set(2, 1, -(at(0, 0) * c4) + at(0, 1) * c2 - at(0, 3) * c0);
  set(2, 2, at(3, 0) * s4 - at(3, 1) * s2 + at(3, 3) * s0);
  set(2, 3, -(at(2, 0) * s4) + at(2, 1) * s2 - at(2, 3) * s0);
  set(3, 0, -(at(1, 0) * c3) + at(1, 1) * c1 - at(1, 2) * c0);
  set(3, 1, at(0, 0) * c3 - at(0, 1) * c1 + at(0, 2) * c0);
  set(3, 2, -(at(3, 0) * s3) + at(3, 1) * s1 - at(3, 2) * s0);
  set(3, 3, at(2, 0) * s3 - at(2, 1) * s1 + at(2, 2) * s0);
  return r;
}

/// Levi-Civita connection: Gamma^r_mn = 1/2 g^rs (d_m g_sn + d_n g_sm - d_s g_mn).
template <class T>
std::vector<T> christoffel_lc(const Mat4<T>& ginv, std::span<const T> dg) {
  const T zero = zero_like(dg[0]);
  std::vector<T> first(64, zero);  // Gamma_{s m n}
  for (int s = 0; s < 4; ++s) {
    for (int m = 0; m < 4; ++m) {
      for (int n = m; n < 4; ++n) {
        const T v = (dg[d1idx(m, s, n)] + dg[d1idx(n, s, m)] - dg[d1idx(s, m, n)]) * 0.5;
        first[gidx(s, m, n)] = v;
        first[gidx(s, n, m)] = v;
      }
    }
  }
  std::vector<T> gamma(64, zero);
  for (int r = 0; r < 4; ++r) {
    for (int m = 0; m < 4; ++m) {
      for (int n = m; n < 4; ++n) {
        T acc = zero;
        for (int s = 0; s < 4; ++s) acc += ginv[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] * first[gidx(s, m, n)];
        gamma[gidx(r, m, n)] = acc;
        gamma[gidx(r, n, m)] = acc;
      }
    }
  }
  return gamma;
}

/// d_tau Gamma^r_mn = g^rs (d_tau Gamma_smn - d_tau g_sk Gamma^k_mn).
template <class T>
std::vector<T> christoffel_lc_derivative(const Mat4<T>& ginv, std::span<const T> dg, std::span<const T> d2g,
                                         std::span<const T> gamma) {
  const T zero = zero_like(dg[0]);
  std::vector<T> dgamma(256, zero);
  std::vector<T> inner(64, zero);
  for (int tau = 0; tau < 4; ++tau) {
    for (int s = 0; s < 4; ++s) {
      for (int m = 0; m < 4; ++m) {
        for (int n = m; n < 4; ++n) {
          T v = (d2g[d2idx(tau, m, s, n)] + d2g[d2idx(tau, n, s, m)] - d2g[d2idx(tau, s, m, n)]) * 0.5;
          for (int k = 0; k < 4; ++k) v -= dg[d1idx(tau, s, k)] * gamma[gidx(k, m, n)];
          inner[gidx(s, m, n)] = v;
        }
      }
    }
    for (int r = 0; r < 4; ++r) {
      for (int m = 0; m < 4; ++m) {
        for (int n = m; n < 4; ++n) {
          T acc = zero;
          for (int s = 0; s < 4; ++s) {
            acc += ginv[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] * inner[gidx(s, m, n)];
          }
          dgamma[dgidx(r, m, n, tau)] = acc;
          dgamma[dgidx(r, n, m, tau)] = acc;
        }
      }
    }
  }
  return dgamma;
}

/// R_ab = Gamma^c_ba,c - Gamma^c_ca,b + Gamma^c_ba Gamma^s_sc - Gamma^c_bs Gamma^s_ca.
/// No symmetry of the connection is assumed.
template <class T>
Mat4<T> ricci_from_connection(std::span<const T> gamma, std::span<const T> dgamma) {
  const T zero = zero_like(gamma[0]);
  std::array<T, 4> trace{zero, zero, zero, zero};  // Gamma^s_sc
  for (int c = 0; c < 4; ++c) {
    for (int s = 0; s < 4; ++s) trace[static_cast<std::size_t>(c)] += gamma[gidx(s, s, c)];
  }
  Mat4<T> ric;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      T acc = zero;
      for (int c = 0; c < 4; ++c) {
        acc += dgamma[dgidx(c, b, a, c)] - dgamma[dgidx(c, c, a, b)];
        acc += gamma[gidx(c, b, a)] * trace[static_cast<std::size_t>(c)];
        for (int s = 0; s < 4; ++s) acc -= gamma[gidx(c, b, s)] * gamma[gidx(s, c, a)];
      }
      ric[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = acc;
    }
  }
  return ric;
}

template <class T>
T contract(const Mat4<T>& up, const Mat4<T>& down) {
  T acc = zero_like(up[0][0]);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) acc += up[a][b] * down[a][b];
  }
  return acc;
}

template <class T>
Mat4<T> raise_both(const Mat4<T>& ginv, const Mat4<T>& low) {
  const T zero = zero_like(low[0][0]);
  Mat4<T> half;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t n = 0; n < 4; ++n) {
      T acc = zero;
      for (std::size_t m = 0; m < 4; ++m) acc += ginv[a][m] * low[m][n];
      half[a][n] = acc;
    }
  }
  Mat4<T> up;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      T acc = zero;
      for (std::size_t n = 0; n < 4; ++n) acc += half[a][n] * ginv[b][n];
      up[a][b] = acc;
    }
  }
  return up;
}

/// Levi-Civita curvature chain from metric, first and second derivatives.
template <class T>
struct Curvature {
  MetricInverse<T> inverse;
  std::vector<T> gamma;
  std::vector<T> dgamma;
  Mat4<T> ricci;
  T scalar;
};

template <class T>
Curvature<T> curvature(const Mat4<T>& g, std::span<const T> dg, std::span<const T> d2g) {
  auto inv = inverse_and_density(g);
  auto gamma = christoffel_lc<T>(inv.inv, dg);
  auto dgamma = christoffel_lc_derivative<T>(inv.inv, dg, d2g, gamma);
  auto ric = ricci_from_connection<T>(gamma, dgamma);
  T scalar = contract(inv.inv, ric);
  return Curvature<T>{std::move(inv), std::move(gamma), std::move(dgamma), std::move(ric), std::move(scalar)};
}

/// Full (unordered) metric tensors read from an EH jet view of order >= 2.
template <class T>
struct MetricTensors {
  Mat4<T> g;
  std::vector<T> dg;
  std::vector<T> d2g;
};

template <class J>
MetricTensors<typename J::scalar_type> metric_tensors(const J& p, int order = 2) {
  using T = typename J::scalar_type;
  MetricTensors<T> t;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      const T v = p[eh::g(a, b)];
      t.g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
      t.g[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v;
    }
  }
  if (order >= 1) {
    t.dg.assign(64, T{});
    for (int tau = 0; tau < 4; ++tau) {
      for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
          const T v = p[eh::dg(a, b, tau)];
          t.dg[d1idx(tau, a, b)] = v;
          t.dg[d1idx(tau, b, a)] = v;
        }
      }
    }
  }
  if (order >= 2) {
    t.d2g.assign(256, T{});
    for (int tau = 0; tau < 4; ++tau) {
      for (int kap = tau; kap < 4; ++kap) {
        for (int a = 0; a < 4; ++a) {
          for (int b = a; b < 4; ++b) {
            const T v = p[eh::d2g(a, b, tau, kap)];
            t.d2g[d2idx(tau, kap, a, b)] = v;
            t.d2g[d2idx(tau, kap, b, a)] = v;
            t.d2g[d2idx(kap, tau, a, b)] = v;
            t.d2g[d2idx(kap, tau, b, a)] = v;
          }
        }
      }
    }
  }
  return t;
}

/// Same tensors built from metric component series by series differentiation,
/// all truncated to a common order (K - 2 for K-th order input).
inline MetricTensors<JetScalar> metric_tensors(std::span<const JetScalar> metric) {
  if (metric.size() != 10) throw UsageError("expected 10 metric component series");
  const int k = metric.front().order() - 2;
  if (k < 0) throw UsageError("metric series need truncation order >= 2");
  MetricTensors<JetScalar> t{Mat4<JetScalar>{}, {}, {}};
  const JetScalar zero(k, metric.front().base_point());
  for (auto& row : t.g) row.fill(zero);
  t.dg.assign(64, zero);
  t.d2g.assign(256, zero);
  for (int p = 0; p < 10; ++p) {
    const auto [a, b] = pair_of(p);
    const JetScalar& s = metric[static_cast<std::size_t>(p)];
    t.g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = s.truncated(k);
    t.g[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = s.truncated(k);
    for (int tau = 0; tau < 4; ++tau) {
      const JetScalar d = series_partial(s, tau);
      t.dg[d1idx(tau, a, b)] = d.truncated(k);
      t.dg[d1idx(tau, b, a)] = d.truncated(k);
      for (int kap = 0; kap < 4; ++kap) {
        const JetScalar dd = series_partial(d, kap);
        t.d2g[d2idx(tau, kap, a, b)] = dd;
        t.d2g[d2idx(tau, kap, b, a)] = dd;
      }
    }
  }
  return t;
}

/// Levi-Civita connection as series of order K-1 from metric series of order K.
inline std::vector<JetScalar> levi_civita_series(std::span<const JetScalar> metric) {
  if (metric.size() != 10) throw UsageError("expected 10 metric component series");
  const int k = metric.front().order() - 1;
  if (k < 0) throw UsageError("metric series need truncation order >= 1");
  const JetScalar zero(k, metric.front().base_point());
  Mat4<JetScalar> g;
  for (auto& row : g) row.fill(zero);
  std::vector<JetScalar> dg(64, zero);
  for (int p = 0; p < 10; ++p) {
    const auto [a, b] = pair_of(p);
    const JetScalar& s = metric[static_cast<std::size_t>(p)];
    g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = s.truncated(k);
    g[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = s.truncated(k);
    for (int tau = 0; tau < 4; ++tau) {
      const JetScalar d = series_partial(s, tau);
      dg[d1idx(tau, a, b)] = d;
      dg[d1idx(tau, b, a)] = d;
    }
  }
  const auto inv = inverse_and_density(g);
  return christoffel_lc<JetScalar>(inv.inv, dg);
}

/// T^a_bc = Gamma^a_bc - Gamma^a_cb.
template <class T>
std::vector<T> torsion(std::span<const T> gamma) {
  std::vector<T> t(64, zero_like(gamma[0]));
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) t[gidx(a, b, c)] = gamma[gidx(a, b, c)] - gamma[gidx(a, c, b)];
    }
  }
  return t;
}

/// The 24 independent torsion components T^a_bc with b < c, a-major.
inline std::array<double, 24> torsion_components(std::span<const double> gamma) {
  const auto t = torsion<double>(gamma);
  std::array<double, 24> out{};
  std::size_t i = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = b + 1; c < 4; ++c) out[i++] = t[gidx(a, b, c)];
    }
  }
  return out;
}

/// Curvature summary of a metric at a point (double precision).
struct CurvatureSuite {
  Mat4<double> g;
  Mat4<double> ginv;
  double rho = 0.0;
  std::vector<double> gamma;   // 64, symmetric in the lower pair
  std::vector<double> dgamma;  // 256
  Mat4<double> ricci;
  double scalar = 0.0;
  Mat4<double> einstein_lower;
  Mat4<double> einstein_upper;
};

template <class T>
Mat4<T> einstein_lower(const Mat4<T>& g, const Mat4<T>& ricci, const T& scalar) {
  Mat4<T> G;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) G[a][b] = ricci[a][b] - g[a][b] * scalar * 0.5;
  }
  return G;
}

inline CurvatureSuite einstein_suite(const Mat4<double>& g, std::span<const double> dg, std::span<const double> d2g) {
  auto c = curvature<double>(g, dg, d2g);
  CurvatureSuite s;
  s.g = g;
  s.ginv = c.inverse.inv;
  s.rho = c.inverse.rho;
  s.gamma = std::move(c.gamma);
  s.dgamma = std::move(c.dgamma);
  s.ricci = c.ricci;
  s.scalar = c.scalar;
  s.einstein_lower = einstein_lower(g, c.ricci, c.scalar);
  s.einstein_upper = raise_both(s.ginv, s.einstein_lower);
  return s;
}

template <class J>
CurvatureSuite einstein_suite(const J& p) {
  const auto t = metric_tensors(p, 2);
  return einstein_suite(t.g, t.dg, t.d2g);
}

}  // namespace msgr
