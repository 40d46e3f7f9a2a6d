#pragma once

// Second-order (Einstein-Hilbert) model on the third jet of the metric bundle.
//
// Momenta conventions. L2[p][q] is L^{ab,mn} for the ordered pairs p = (a<=b),
// q = (m<=n): (1/n(mn)) dL/dg_{ab,mn}. L1[p][m] is L^{ab,m}. Full-range sums
// over (m, n) of L2 g_{ab,mn} equal ordered sums weighted by n(mn), which is
// how the Hamiltonian sum form is evaluated.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "msgr/dual.hpp"
#include "msgr/exterior.hpp"
#include "msgr/geometry.hpp"
#include "msgr/indexing.hpp"
#include "msgr/jet_space.hpp"

namespace msgr {

namespace eh_detail {

inline std::vector<int> dg_ids() {
  std::vector<int> ids;
  for (int p = 0; p < 10; ++p) {
    for (int m = 0; m < 4; ++m) ids.push_back(EHLayout::id(p, 1, m));
  }
  return ids;
}

inline std::vector<int> d2g_ids() {
  std::vector<int> ids;
  for (int p = 0; p < 10; ++p) {
    for (int q = 0; q < 10; ++q) ids.push_back(EHLayout::id(p, 2, q));
  }
  return ids;
}

inline std::vector<int> id_range(int lo, int hi) {
  std::vector<int> ids;
  for (int i = lo; i < hi; ++i) ids.push_back(i);
  return ids;
}

template <class T>
Mat4<T> metric_matrix(const auto& p) {
  Mat4<T> g;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      const T v = p[eh::g(a, b)];
      g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
      g[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v;
    }
  }
  return g;
}

}  // namespace eh_detail

/// L = rho g^ab R_ab with the Levi-Civita connection of g.
struct EHLagrangian {
  static constexpr int jet_order = 2;
  static constexpr std::size_t outputs = 1;

  template <class J>
  std::array<typename J::scalar_type, 1> operator()(const J& p) const {
    using T = typename J::scalar_type;
    const auto t = metric_tensors(p, 2);
    const auto c = curvature<T>(t.g, t.dg, t.d2g);
    return {c.inverse.rho * c.scalar};
  }
};

/// Closed form (n(ab)/2) rho (g^am g^bn + g^an g^bm - 2 g^ab g^mn), index 10 p + q.
struct EHMomentumL2Closed {
  static constexpr int jet_order = 0;
  static constexpr std::size_t outputs = 100;

  template <class J>
  std::array<typename J::scalar_type, 100> operator()(const J& p) const {
    using T = typename J::scalar_type;
    const auto inv = inverse_and_density(eh_detail::metric_matrix<T>(p));
    const auto& gi = inv.inv;
    std::array<T, 100> out;
    for (int pa = 0; pa < 10; ++pa) {
      const auto [a, b] = pair_of(pa);
      const double half_n = 0.5 * n_mult(a, b);
      for (int q = 0; q < 10; ++q) {
        const auto [m, n] = pair_of(q);
        const auto A = static_cast<std::size_t>(a), B = static_cast<std::size_t>(b);
        const auto M = static_cast<std::size_t>(m), N = static_cast<std::size_t>(n);
        out[static_cast<std::size_t>(10 * pa + q)] =
            inv.rho * (gi[A][M] * gi[B][N] + gi[A][N] * gi[B][M] - gi[A][B] * gi[M][N] * 2.0) * half_n;
      }
    }
    return out;
  }
};

/// [0] = Hamiltonian in sum form, [1 + 4 p + m] = L^{ab,m}.
/// dL/dg_{ab,m} comes from tangent propagation; the total-derivative term
/// uses the closed form of L^{ab,mn}.
struct EHCanonicalMomenta {
  static constexpr int jet_order = 2;
  static constexpr std::size_t outputs = 41;

  template <class J>
  std::array<typename J::scalar_type, 41> operator()(const J& p) const {
    using T = typename J::scalar_type;
    static const std::vector<int> ids = eh_detail::dg_ids();
    const auto dl = jacobian<40>(EHLagrangian{}, p, ids);
    const auto l2 = total_derivatives(EHMomentumL2Closed{}, p);

    std::array<T, 41> out;
    T h = -dl.value[0];
    for (int pa = 0; pa < 10; ++pa) {
      for (int m = 0; m < 4; ++m) {
        T l1 = dl.d[static_cast<std::size_t>(4 * pa + m)];
        for (int n = 0; n < 4; ++n) {
          l1 -= l2[static_cast<std::size_t>(1 + n)][static_cast<std::size_t>(10 * pa + pair_index(m, n))];
        }
        h += l1 * p[EHLayout::id(pa, 1, m)];
        out[static_cast<std::size_t>(1 + 4 * pa + m)] = l1;
      }
      for (int q = 0; q < 10; ++q) {
        const auto [m, n] = pair_of(q);
        h += l2[0][static_cast<std::size_t>(10 * pa + q)] * p[EHLayout::id(pa, 2, q)] * static_cast<double>(n_mult(m, n));
      }
    }
    out[0] = h;
    return out;
  }
};

/// L^{ab} = -rho n(ab) (R^ab - g^ab R / 2) over ordered pairs.
struct EHEinsteinConstraint {
  static constexpr int jet_order = 2;
  static constexpr std::size_t outputs = 10;

  template <class J>
  std::array<typename J::scalar_type, 10> operator()(const J& p) const {
    using T = typename J::scalar_type;
    const auto t = metric_tensors(p, 2);
    const auto c = curvature<T>(t.g, t.dg, t.d2g);
    const auto up = raise_both(c.inverse.inv, einstein_lower(t.g, c.ricci, c.scalar));
    std::array<T, 10> out;
    for (int pa = 0; pa < 10; ++pa) {
      const auto [a, b] = pair_of(pa);
      out[static_cast<std::size_t>(pa)] =
          -(c.inverse.rho * up[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) * static_cast<double>(n_mult(a, b));
    }
    return out;
  }
};

/// H^{ab kl mn} over full index ranges.
template <class T>
T hamiltonian_coefficient(const Mat4<T>& gi, int a, int b, int k, int l, int m, int n) {
  auto G = [&](int i, int j) -> const T& { return gi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  return G(a, b) * G(k, l) * G(m, n) * 0.25 - G(a, k) * G(b, l) * G(m, n) * 0.25 + G(a, k) * G(l, m) * G(b, n) * 0.5 -
         G(a, b) * G(l, n) * G(k, m) * 0.5;
}

/// rho g_{ab,m} g_{kl,n} H^{ab kl mn} summed over all 4^6 index values.
template <class J>
double hamiltonian_closed(const J& p) {
  const auto g = eh_detail::metric_matrix<double>(p);
  const auto inv = inverse_and_density(g);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int m = 0; m < 4; ++m) {
        const double ga = p[eh::dg(a, b, m)];
        if (ga == 0.0) continue;
        for (int k = 0; k < 4; ++k) {
          for (int l = 0; l < 4; ++l) {
            for (int n = 0; n < 4; ++n) {
              acc += ga * p[eh::dg(k, l, n)] * hamiltonian_coefficient(inv.inv, a, b, k, l, m, n);
            }
          }
        }
      }
    }
  }
  return inv.rho * acc;
}

inline double lagrangian_eh(const EHJetPoint& p) { return EHLagrangian{}(p)[0]; }

struct EHMomenta {
  std::array<double, 100> L2{};         // from tangent propagation, divided by n(mn)
  std::array<double, 100> L2_closed{};  // closed form
  std::array<double, 40> L1{};
  double L = 0.0;
  double H_sum = 0.0;     // ordered sums with n-weights, using the propagated L2
  double H_closed = 0.0;  // rho g g H^{...} over full ranges

  double l2(int a, int b, int m, int n) const {
    return L2[static_cast<std::size_t>(10 * pair_index(a, b) + pair_index(m, n))];
  }
  double l1(int a, int b, int m) const { return L1[static_cast<std::size_t>(4 * pair_index(a, b) + m)]; }
};

inline EHMomenta momenta_and_hamiltonian(const EHJetPoint& p) {
  if (p.order() < 2) throw UsageError("momenta need a jet point of order >= 2");
  static const std::vector<int> d2 = eh_detail::d2g_ids();
  EHMomenta m;
  const auto dl = jacobian<25>(EHLagrangian{}, p, d2);
  m.L = dl.value[0];
  for (int pa = 0; pa < 10; ++pa) {
    for (int q = 0; q < 10; ++q) {
      const auto [mu, nu] = pair_of(q);
      m.L2[static_cast<std::size_t>(10 * pa + q)] = dl.d[static_cast<std::size_t>(10 * pa + q)] / n_mult(mu, nu);
    }
  }
  m.L2_closed = EHMomentumL2Closed{}(p);
  const auto cm = EHCanonicalMomenta{}(p);
  std::copy(cm.begin() + 1, cm.end(), m.L1.begin());

  double h = -m.L;
  for (int pa = 0; pa < 10; ++pa) {
    for (int q = 0; q < 10; ++q) {
      const auto [mu, nu] = pair_of(q);
      h += n_mult(mu, nu) * m.L2[static_cast<std::size_t>(10 * pa + q)] * p[EHLayout::id(pa, 2, q)];
    }
    for (int mu = 0; mu < 4; ++mu) h += m.L1[static_cast<std::size_t>(4 * pa + mu)] * p[EHLayout::id(pa, 1, mu)];
  }
  m.H_sum = h;
  m.H_closed = hamiltonian_closed(p);
  return m;
}

inline std::array<double, 10> constraint_einstein(const EHJetPoint& p) {
  if (p.order() < 2) throw UsageError("the Einstein constraint needs a jet point of order >= 2");
  return EHEinsteinConstraint{}(p);
}

/// D_tau L^{ab}, index 4 p + tau. Reads the order-3 block.
inline std::array<double, 40> constraint_einstein_derivative(const EHJetPoint& p) {
  const auto d = total_derivatives(EHEinsteinConstraint{}, p);
  std::array<double, 40> out{};
  for (int pa = 0; pa < 10; ++pa) {
    for (int tau = 0; tau < 4; ++tau) {
      out[static_cast<std::size_t>(4 * pa + tau)] = d[static_cast<std::size_t>(1 + tau)][static_cast<std::size_t>(pa)];
    }
  }
  return out;
}

/// Base-space derivatives of a section (g_ab(x), g_ab,m(x)) at a point.
struct SectionDerivatives {
  std::array<std::array<double, 4>, 10> dg_dx{};                  // d g_p / dx^m
  std::array<std::array<std::array<double, 4>, 4>, 10> d1g_dx{};  // d g_{p,m} / dx^n at [p][m][n]
};

/// Section derivatives of the holonomic lift of a metric given by series.
inline SectionDerivatives section_derivatives(std::span<const JetScalar> metric) {
  if (metric.size() != 10) throw UsageError("expected 10 metric component series");
  SectionDerivatives s;
  for (std::size_t pa = 0; pa < 10; ++pa) {
    for (int m = 0; m < 4; ++m) {
      const JetScalar d = series_partial(metric[pa], m);
      s.dg_dx[pa][static_cast<std::size_t>(m)] = d.value();
      for (int n = 0; n < 4; ++n) {
        s.d1g_dx[pa][static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = series_partial(d, n).value();
      }
    }
  }
  return s;
}

struct HolonomyResiduals {
  std::array<double, 40> first{};    // [4 p + m]
  std::array<double, 100> second{};  // [10 p + q]
};

/// g_{ab,m} - d g_ab/dx^m, and g_{ab,mn} minus the average of the two
/// orderings d g_{ab,m}/dx^n, d g_{ab,n}/dx^m (a single term on the diagonal).
inline HolonomyResiduals holonomy_residuals(const EHJetPoint& p, const SectionDerivatives& s) {
  if (p.order() < 2) throw UsageError("holonomy residuals need a jet point of order >= 2");
  HolonomyResiduals r;
  for (int pa = 0; pa < 10; ++pa) {
    const auto P = static_cast<std::size_t>(pa);
    for (int m = 0; m < 4; ++m) {
      r.first[4 * P + static_cast<std::size_t>(m)] = p[EHLayout::id(pa, 1, m)] - s.dg_dx[P][static_cast<std::size_t>(m)];
    }
    for (int q = 0; q < 10; ++q) {
      const auto [m, n] = pair_of(q);
      const auto M = static_cast<std::size_t>(m), N = static_cast<std::size_t>(n);
      const double sym = (m == n) ? s.d1g_dx[P][M][N] : 0.5 * (s.d1g_dx[P][M][N] + s.d1g_dx[P][N][M]);
      r.second[10 * P + static_cast<std::size_t>(q)] = p[EHLayout::id(pa, 2, q)] - sym;
    }
  }
  return r;
}

/// dH ^ d4x - sum dL^{ab,m} ^ dg_ab ^ d3x_m - sum dL^{ab,mn} ^ dg_{ab,m} ^ d3x_n,
/// on the ambient space J^3 (354 coordinates). The last sum runs over the
/// full (m, n) range.
inline FiveForm cartan_form_eh(const EHJetPoint& p) {
  if (p.order() < 3) throw UsageError("the Poincare-Cartan form lives on J^3: need a jet point of order >= 3");
  constexpr int ambient = EHLayout::dim(3);
  static const std::vector<int> ids2 = eh_detail::id_range(0, EHLayout::dim(2));
  static const std::vector<int> ids0 = eh_detail::id_range(0, EHLayout::dim(0));

  const auto dm = jacobian<24>(EHCanonicalMomenta{}, p, ids2);
  const auto d2 = jacobian<14>(EHMomentumL2Closed{}, p, ids0);

  auto row = [&](const auto& jac, std::size_t i) {
    std::vector<double> c(ambient, 0.0);
    const std::size_t n = jac.coords.size();
    for (std::size_t j = 0; j < n; ++j) c[static_cast<std::size_t>(jac.coords[j])] = jac.d[i * n + j];
    return DenseCovector::from(std::move(c));
  };

  FiveForm form;
  form.dim = ambient;
  form.terms.reserve(201);
  form.terms.push_back(
      FormTerm{1.0, {row(dm, 0), CoordDifferential{0}, CoordDifferential{1}, CoordDifferential{2}, CoordDifferential{3}}});
  for (int pa = 0; pa < 10; ++pa) {
    for (int m = 0; m < 4; ++m) {
      const auto s = d3x(m);
      form.terms.push_back(FormTerm{-s.sign,
                                    {row(dm, static_cast<std::size_t>(1 + 4 * pa + m)), CoordDifferential{EHLayout::id(pa, 0, 0)},
                                     s.factors[0], s.factors[1], s.factors[2]}});
    }
  }
  for (int pa = 0; pa < 10; ++pa) {
    std::array<DenseCovector, 10> dl2;
    for (int q = 0; q < 10; ++q) dl2[static_cast<std::size_t>(q)] = row(d2, static_cast<std::size_t>(10 * pa + q));
    for (int m = 0; m < 4; ++m) {
      for (int n = 0; n < 4; ++n) {
        const auto s = d3x(n);
        form.terms.push_back(FormTerm{-s.sign,
                                      {dl2[static_cast<std::size_t>(pair_index(m, n))], CoordDifferential{EHLayout::id(pa, 1, m)},
                                       s.factors[0], s.factors[1], s.factors[2]}});
      }
    }
  }
  return form;
}

/// The four tangent-lift vectors D_tau of the prolonged section, over J^3.
inline std::array<TangentVector, 4> eh_tangent_lift(const EHJetPoint& p) {
  if (p.order() < 4) throw UsageError("the tangent lift on J^3 needs the order-4 block");
  std::array<TangentVector, 4> x;
  for (int tau = 0; tau < 4; ++tau) x[static_cast<std::size_t>(tau)] = total_derivative_vector(p, tau, 3);
  return x;
}

struct FieldEquationResidual {
  CotangentVector covector;
  double norm = 0.0;  // max-norm
  std::size_t terms = 0;
};

/// i(X_0 ^ X_1 ^ X_2 ^ X_3) Omega_L at a prolonged point carrying order-4 data.
inline FieldEquationResidual verify_field_equation(const EHJetPoint& p) {
  const auto x = eh_tangent_lift(p);
  const auto form = cartan_form_eh(p);
  FieldEquationResidual r;
  r.covector = form.contract(TangentFrame{x[0], x[1], x[2], x[3]});
  r.norm = max_abs(r.covector);
  r.terms = form.terms.size();
  return r;
}

/// Draw u in [-0.1, 0.1] and move c to c + u max(|c|, 1).
inline double perturb_coordinate(double c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  return c + u(rng) * std::max(std::abs(c), 1.0);
}

/// max |a - b| / (1 + max |b|)
inline double relative_deviation(std::span<const double> a, std::span<const double> b) {
  double num = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return num / (1.0 + scale);
}

struct ProjectabilityReport {
  double hamiltonian_closed = 0.0;
  double hamiltonian_sum = 0.0;
  double momenta_second = 0.0;  // L^{ab,mn}
  double momenta_first = 0.0;   // L^{ab,m}
  double lagrangian = 0.0;      // control: must move

  double max_deviation() const {
    return std::max({hamiltonian_closed, hamiltonian_sum, momenta_second, momenta_first});
  }
};

/// Randomize the order-2 and order-3 blocks `trials` times and record how far
/// the momenta and the Hamiltonian move (relative deviation).
inline ProjectabilityReport projectability_check(const EHJetPoint& p, int trials, std::uint64_t seed) {
  if (p.order() < 3) throw UsageError("projectability check needs a jet point of order >= 3");
  const EHJetPoint base = p.truncated(3);
  const EHMomenta m0 = momenta_and_hamiltonian(base);
  std::mt19937_64 rng(seed);
  ProjectabilityReport r;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> c(base.coords().begin(), base.coords().end());
    for (int id = EHLayout::offset(2); id < EHLayout::dim(3); ++id) {
      c[static_cast<std::size_t>(id)] = perturb_coordinate(c[static_cast<std::size_t>(id)], rng);
    }
    const EHJetPoint q(3, std::move(c));
    const EHMomenta m = momenta_and_hamiltonian(q);
    const std::array<double, 1> hc{m.H_closed}, hc0{m0.H_closed}, hs{m.H_sum}, hs0{m0.H_sum}, l{m.L}, l0{m0.L};
    r.hamiltonian_closed = std::max(r.hamiltonian_closed, relative_deviation(hc, hc0));
    r.hamiltonian_sum = std::max(r.hamiltonian_sum, relative_deviation(hs, hs0));
    r.momenta_second = std::max(r.momenta_second, relative_deviation(m.L2, m0.L2));
    r.momenta_first = std::max(r.momenta_first, relative_deviation(m.L1, m0.L1));
    r.lagrangian = std::max(r.lagrangian, relative_deviation(l, l0));
  }
  return r;
}

}  // namespace msgr
