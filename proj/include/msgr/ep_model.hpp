#pragma once

// First-order metric-affine (Einstein-Palatini) model on J^1 of the bundle
// of metrics and linear connections.
//
// Flat index of the connection momenta L_a^{bc,s}: 4 (16 a + 4 b + c) + s,
// which is also the order of the dGamma coordinates in the jet layout.

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

namespace ep_detail {

inline constexpr int kDGammaOffset = EPLayout::offset(1) + 4 * 10;

inline std::vector<int> dgamma_ids() {
  std::vector<int> ids(256);
  for (int k = 0; k < 256; ++k) ids[static_cast<std::size_t>(k)] = kDGammaOffset + k;
  return ids;
}

inline std::vector<int> id_range(int lo, int hi) {
  std::vector<int> ids;
  for (int i = lo; i < hi; ++i) ids.push_back(i);
  return ids;
}

template <class T, class J>
Mat4<T> metric_matrix(const J& p) {
  Mat4<T> g;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      const T v = p[ep::g(a, b)];
      g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
      g[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v;
    }
  }
  return g;
}

template <class T, class J>
std::vector<T> connection(const J& p) {
  std::vector<T> gamma;
  gamma.reserve(64);
  for (int k = 0; k < 64; ++k) gamma.push_back(p[EPLayout::id(10 + k, 0, 0)]);
  return gamma;
}

template <class T, class J>
std::vector<T> connection_derivative(const J& p) {
  std::vector<T> d;
  d.reserve(256);
  for (int k = 0; k < 256; ++k) d.push_back(p[kDGammaOffset + k]);
  return d;
}

}  // namespace ep_detail

/// rho g^ab (Gamma^c_ba,c - Gamma^c_ca,b + Gamma^c_ba Gamma^s_sc - Gamma^c_bs Gamma^s_ca).
struct EPLagrangian {
  static constexpr int jet_order = 1;
  static constexpr std::size_t outputs = 1;

  template <class J>
  std::array<typename J::scalar_type, 1> operator()(const J& p) const {
    using T = typename J::scalar_type;
    const auto inv = inverse_and_density(ep_detail::metric_matrix<T>(p));
    const auto gamma = ep_detail::connection<T>(p);
    const auto dgamma = ep_detail::connection_derivative<T>(p);
    const auto ric = ricci_from_connection<T>(gamma, dgamma);
    return {inv.rho * contract(inv.inv, ric)};
  }
};

/// [0] = H = L_a^{bc,s} Gamma^a_bc,s - L, [1 + k] = L_a^{bc,s} = dL/dGamma^a_bc,s.
struct EPMomentaHamiltonian {
  static constexpr int jet_order = 1;
  static constexpr std::size_t outputs = 257;

  template <class J>
  std::array<typename J::scalar_type, 257> operator()(const J& p) const {
    using T = typename J::scalar_type;
    static const std::vector<int> ids = ep_detail::dgamma_ids();
    const auto jac = jacobian<64>(EPLagrangian{}, p, ids);
    std::array<T, 257> out;
    T h = -jac.value[0];
    for (int k = 0; k < 256; ++k) {
      const T& lm = jac.d[static_cast<std::size_t>(k)];
      out[static_cast<std::size_t>(1 + k)] = lm;
      h += lm * p[ep_detail::kDGammaOffset + k];
    }
    out[0] = h;
    return out;
  }
};

inline double lagrangian_ep(const EPJetPoint& p) { return EPLagrangian{}(p)[0]; }

constexpr std::size_t lmom_index(int a, int b, int c, int s) {
  return static_cast<std::size_t>(4 * (16 * a + 4 * b + c) + s);
}

struct EPMomenta {
  std::vector<double> Lmom;         // 256, from tangent propagation
  std::vector<double> Lmom_closed;  // 256, rho (g^cb delta^s_a - g^cs delta^b_a)
  double H = 0.0;
  double L = 0.0;

  /// max |L_a^{bc,s} + L_a^{sc,b}|
  double antisymmetry_residual() const {
    double m = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int s = 0; s < 4; ++s) m = std::max(m, std::abs(Lmom[lmom_index(a, b, c, s)] + Lmom[lmom_index(a, s, c, b)]));
    return m;
  }
};

inline EPMomenta momenta_ep(const EPJetPoint& p) {
  if (p.order() < 1) throw UsageError("connection momenta need a jet point of order >= 1");
  const auto mh = EPMomentaHamiltonian{}(p);
  EPMomenta m;
  m.H = mh[0];
  m.Lmom.assign(mh.begin() + 1, mh.end());
  m.L = lagrangian_ep(p);
  const auto inv = inverse_and_density(ep_detail::metric_matrix<double>(p));
  m.Lmom_closed.assign(256, 0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int s = 0; s < 4; ++s) {
          const auto B = static_cast<std::size_t>(b), C = static_cast<std::size_t>(c), S = static_cast<std::size_t>(s);
          m.Lmom_closed[lmom_index(a, b, c, s)] =
              inv.rho * ((s == a ? inv.inv[C][B] : 0.0) - (b == a ? inv.inv[C][S] : 0.0));
        }
  return m;
}

/// dH/dg_mn - dL_a^{bc,s}/dg_mn Gamma^a_bc,s for the ordered pairs m <= n.
/// The g-partials come from a second layer of tangent propagation.
inline std::array<double, 10> constraint_c0(const EPJetPoint& p) {
  if (p.order() < 1) throw UsageError("constraint needs a jet point of order >= 1");
  std::vector<int> gids;
  for (int q = 0; q < 10; ++q) gids.push_back(EPLayout::id(q, 0, 0));
  const auto jac = jacobian<10>(EPMomentaHamiltonian{}, p, gids);
  std::array<double, 10> out{};
  for (std::size_t q = 0; q < 10; ++q) {
    double v = jac.at(0, q);
    for (int k = 0; k < 256; ++k) v -= jac.at(static_cast<std::size_t>(1 + k), q) * p[ep_detail::kDGammaOffset + k];
    out[q] = v;
  }
  return out;
}

/// g_rs,m - g_sl Gamma^l_mr - g_rl Gamma^l_ms - (2/3) g_rs T^l_lm, index 4 pair(r,s) + m.
inline std::array<double, 40> constraint_premetricity(const EPJetPoint& p) {
  if (p.order() < 1) throw UsageError("constraint needs a jet point of order >= 1");
  const auto g = ep_detail::metric_matrix<double>(p);
  const auto gam = ep_detail::connection<double>(p);
  const auto t = torsion<double>(gam);
  std::array<double, 4> trace{};
  for (int m = 0; m < 4; ++m)
    for (int l = 0; l < 4; ++l) trace[static_cast<std::size_t>(m)] += t[gidx(l, l, m)];
  std::array<double, 40> out{};
  for (int q = 0; q < 10; ++q) {
    const auto [r, s] = pair_of(q);
    const auto R = static_cast<std::size_t>(r), S = static_cast<std::size_t>(s);
    for (int m = 0; m < 4; ++m) {
      double v = p[ep::dg(r, s, m)];
      for (int l = 0; l < 4; ++l) {
        const auto L = static_cast<std::size_t>(l);
        v -= g[S][L] * gam[gidx(l, m, r)] + g[R][L] * gam[gidx(l, m, s)];
      }
      v -= (2.0 / 3.0) * g[R][S] * trace[static_cast<std::size_t>(m)];
      out[static_cast<std::size_t>(4 * q + m)] = v;
    }
  }
  return out;
}

/// T^a_bc - (1/3) delta^a_b T^m_mc + (1/3) delta^a_c T^m_mb on all 64 slots.
inline std::vector<double> remove_torsion_trace(std::span<const double> t) {
  std::array<double, 4> tr{};
  for (int c = 0; c < 4; ++c)
    for (int m = 0; m < 4; ++m) tr[static_cast<std::size_t>(c)] += t[gidx(m, m, c)];
  std::vector<double> out(64);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double v = t[gidx(a, b, c)];
        if (a == b) v -= tr[static_cast<std::size_t>(c)] / 3.0;
        if (a == c) v += tr[static_cast<std::size_t>(b)] / 3.0;
        out[gidx(a, b, c)] = v;
      }
  return out;
}

/// Independent components (b < c, a-major) of an antisymmetric-in-bc array.
inline std::array<double, 24> antisymmetric_components(std::span<const double> t) {
  std::array<double, 24> out{};
  std::size_t i = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c) out[i++] = t[gidx(a, b, c)];
  return out;
}

inline std::array<double, 24> constraint_torsion(const EPJetPoint& p) {
  const auto t = torsion<double>(ep_detail::connection<double>(p));
  return antisymmetric_components(remove_torsion_trace(t));
}

/// Trace-removed T^a_bc,n with T^a_bc,n = Gamma^a_bc,n - Gamma^a_cb,n; index 4 i + n.
inline std::array<double, 96> constraint_torsion_deriv(const EPJetPoint& p) {
  if (p.order() < 1) throw UsageError("constraint needs a jet point of order >= 1");
  const auto dg = ep_detail::connection_derivative<double>(p);
  std::array<double, 96> out{};
  for (int n = 0; n < 4; ++n) {
    std::vector<double> slice(64);
    for (int k = 0; k < 64; ++k) slice[static_cast<std::size_t>(k)] = dg[static_cast<std::size_t>(4 * k + n)];
    const auto c = antisymmetric_components(remove_torsion_trace(torsion<double>(slice)));
    for (std::size_t i = 0; i < 24; ++i) out[4 * i + static_cast<std::size_t>(n)] = c[i];
  }
  return out;
}

/// Ordered antisymmetric pairs (m < n) in the order 01, 02, 03, 12, 13, 23.
constexpr std::array<std::array<int, 2>, 6> kAntiPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Integrability constraints with A_[mn] = (A_mn - A_nm)/2; index 6 pair(r,s) + k,
/// where k enumerates kAntiPairs.
inline std::array<double, 60> constraint_integrability(const EPJetPoint& p) {
  if (p.order() < 1) throw UsageError("constraint needs a jet point of order >= 1");
  const auto g = ep_detail::metric_matrix<double>(p);
  const auto gam = ep_detail::connection<double>(p);
  const auto dgam = ep_detail::connection_derivative<double>(p);
  auto G = [&](int l, int m, int n) { return gam[gidx(l, m, n)]; };
  auto dG = [&](int l, int m, int n, int t) { return dgam[dgidx(l, m, n, t)]; };
  // d_n T^l_lm
  auto dtrace = [&](int m, int n) {
    double v = 0.0;
    for (int l = 0; l < 4; ++l) v += dG(l, l, m, n) - dG(l, m, l, n);
    return v;
  };
  // Gamma^c_[n|l| Gamma^l_m]s
  auto quad = [&](int c, int n, int m, int s) {
    double v = 0.0;
    for (int l = 0; l < 4; ++l) v += G(c, n, l) * G(l, m, s) - G(c, m, l) * G(l, n, s);
    return 0.5 * v;
  };
  std::array<double, 60> out{};
  for (int q = 0; q < 10; ++q) {
    const auto [r, s] = pair_of(q);
    const auto R = static_cast<std::size_t>(r), S = static_cast<std::size_t>(s);
    for (std::size_t k = 0; k < 6; ++k) {
      const int m = kAntiPairs[k][0];
      const int n = kAntiPairs[k][1];
      double v = 0.0;
      for (int c = 0; c < 4; ++c) {
        const auto C = static_cast<std::size_t>(c);
        v += g[R][C] * quad(c, n, m, s) + g[S][C] * quad(c, n, m, r);
        v += g[R][C] * 0.5 * (dG(c, m, s, n) - dG(c, n, s, m));
        v += g[S][C] * 0.5 * (dG(c, m, r, n) - dG(c, n, r, m));
      }
      v += (2.0 / 3.0) * g[R][S] * 0.5 * (dtrace(m, n) - dtrace(n, m));
      out[static_cast<std::size_t>(6 * q) + k] = v;
    }
  }
  return out;
}

/// dH ^ d4x - sum dL_a^{bc,m} ^ dGamma^a_bc ^ d3x_m on J^1 (374 coordinates).
inline FiveForm cartan_form_ep(const EPJetPoint& p) {
  if (p.order() < 1) throw UsageError("the Poincare-Cartan form lives on J^1: need a jet point of order >= 1");
  constexpr int ambient = EPLayout::dim(1);
  static const std::vector<int> ids = ep_detail::id_range(0, ambient);
  const EPJetPoint q = p.truncated(1);
  const auto jac = jacobian<32>(EPMomentaHamiltonian{}, q, ids);

  auto row = [&](std::size_t i) {
    std::vector<double> c(jac.d.begin() + static_cast<std::ptrdiff_t>(i * ids.size()),
                          jac.d.begin() + static_cast<std::ptrdiff_t>((i + 1) * ids.size()));
    return DenseCovector::from(std::move(c));
  };

  FiveForm form;
  form.dim = ambient;
  form.terms.reserve(257);
  form.terms.push_back(
      FormTerm{1.0, {row(0), CoordDifferential{0}, CoordDifferential{1}, CoordDifferential{2}, CoordDifferential{3}}});
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int m = 0; m < 4; ++m) {
          const auto s = d3x(m);
          form.terms.push_back(FormTerm{-s.sign,
                                        {row(1 + lmom_index(a, b, c, m)), CoordDifferential{ep::Gamma(a, b, c)},
                                         s.factors[0], s.factors[1], s.factors[2]}});
        }
  return form;
}

inline std::array<TangentVector, 4> ep_tangent_lift(const EPJetPoint& p) {
  if (p.order() < 2) throw UsageError("the tangent lift on J^1 needs the order-2 extension block");
  std::array<TangentVector, 4> x;
  for (int tau = 0; tau < 4; ++tau) x[static_cast<std::size_t>(tau)] = total_derivative_vector(p, tau, 1);
  return x;
}

struct EPFieldEquationResidual {
  CotangentVector covector;
  double norm = 0.0;
  std::size_t terms = 0;
};

inline EPFieldEquationResidual verify_field_equation_ep(const EPJetPoint& p) {
  const auto x = ep_tangent_lift(p);
  const auto form = cartan_form_ep(p);
  EPFieldEquationResidual r;
  r.covector = form.contract(TangentFrame{x[0], x[1], x[2], x[3]});
  r.norm = max_abs(r.covector);
  r.terms = form.terms.size();
  return r;
}

/// Gamma^a_bc += delta^a_c A_b and Gamma^a_bc,n += delta^a_c dA[b][n], with
/// dA[b][n] = d_n A_b. Extension-block entries are left unchanged.
inline EPJetPoint projective_shift(const EPJetPoint& p, const std::array<double, 4>& A,
                                   const std::array<std::array<double, 4>, 4>& dA) {
  std::vector<double> c(p.coords().begin(), p.coords().end());
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      c[static_cast<std::size_t>(ep::Gamma(a, b, a))] += A[static_cast<std::size_t>(b)];
      if (p.order() >= 1) {
        for (int n = 0; n < 4; ++n) {
          c[static_cast<std::size_t>(ep::dGamma(a, b, a, n))] += dA[static_cast<std::size_t>(b)][static_cast<std::size_t>(n)];
        }
      }
    }
  return EPJetPoint(p.order(), std::move(c));
}

struct EPProjectabilityReport {
  double hamiltonian = 0.0;
  double momenta = 0.0;
  double hamiltonian_dgamma_only = 0.0;  // randomizing dGamma alone
  double lagrangian = 0.0;               // control: must move

  double max_deviation() const { return std::max(hamiltonian, momenta); }
};

/// Randomize dGamma and dg `trials` times (plus a dGamma-only pass) and record
/// how far H and the connection momenta move.
inline EPProjectabilityReport projectability_check_ep(const EPJetPoint& p, int trials, std::uint64_t seed) {
  if (p.order() < 1) throw UsageError("projectability check needs a jet point of order >= 1");
  const EPJetPoint base = p.truncated(1);
  const auto m0 = EPMomentaHamiltonian{}(base);
  const std::array<double, 1> l0{lagrangian_ep(base)};
  const std::span<const double> lm0(m0.begin() + 1, m0.end());
  const std::array<double, 1> h0{m0[0]};
  std::mt19937_64 rng(seed);
  EPProjectabilityReport r;
  for (int t = 0; t < trials; ++t) {
    for (int pass = 0; pass < 2; ++pass) {
      const bool dgamma_only = pass == 1;
      std::vector<double> c(base.coords().begin(), base.coords().end());
      const int lo = dgamma_only ? ep_detail::kDGammaOffset : EPLayout::offset(1);
      for (int id = lo; id < EPLayout::dim(1); ++id) {
        c[static_cast<std::size_t>(id)] = perturb_coordinate(c[static_cast<std::size_t>(id)], rng);
      }
      const EPJetPoint q(1, std::move(c));
      const auto m = EPMomentaHamiltonian{}(q);
      const std::array<double, 1> h{m[0]};
      const std::array<double, 1> l{lagrangian_ep(q)};
      const double dh = relative_deviation(h, h0);
      if (dgamma_only) {
        r.hamiltonian_dgamma_only = std::max(r.hamiltonian_dgamma_only, dh);
      } else {
        r.hamiltonian = std::max(r.hamiltonian, dh);
        r.momenta = std::max(r.momenta, relative_deviation(std::span<const double>(m.begin() + 1, m.end()), lm0));
      }
      r.lagrangian = std::max(r.lagrangian, relative_deviation(l, l0));
    }
  }
  return r;
}

}  // namespace msgr
