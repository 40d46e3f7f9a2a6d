#pragma once

// Jet-coordinate data model and fiber differentiation.
//
// Both bundles are described by a FieldLayout: four base coordinates x^mu
// followed, for every jet order r, by one block holding each field component
// differentiated along every nondecreasing index string of length r.
//
//   Einstein-Hilbert  J^3 pi : 10 fields g_ab (a<=b), orders 0..3, plus an
//                              optional order-4 block used only as "one more
//                              order" for total derivatives and tangent lifts.
//   Einstein-Palatini J^1 Pi : 10 fields g_ab followed by 64 connection
//                              components Gamma^l_mn, orders 0..1, plus an
//                              optional order-2 block with the same role.
//
// A FiberFunction is any object with
//   static constexpr int jet_order;          // highest jet order it reads
//   static constexpr std::size_t outputs;
//   template <class J> std::array<typename J::scalar_type, outputs>
//   operator()(const J& p) const;
// where J is any jet view (plain storage or a seeded tangent view).

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "msgr/dual.hpp"
#include "msgr/errors.hpp"
#include "msgr/indexing.hpp"
#include "msgr/taylor.hpp"

namespace msgr {

template <int NFields, int SpaceOrder, int MaxOrder>
struct FieldLayout {
  static constexpr int fields = NFields;
  static constexpr int space_order = SpaceOrder;
  static constexpr int max_order = MaxOrder;

  /// First id of the order-r block.
  static constexpr int offset(int r) {
    int off = kDim;
    for (int s = 0; s < r; ++s) off += NFields * deriv_count(s);
    return off;
  }

  /// Number of coordinates when blocks 0..order are present.
  static constexpr int dim(int order) { return offset(order + 1); }

  /// dim of the bundle itself (base plus order-0 fiber) and of the jet space.
  static constexpr int bundle_dim() { return dim(0); }
  static constexpr int space_dim() { return dim(SpaceOrder); }

  static constexpr int id(int field, int r, int rank) { return offset(r) + deriv_count(r) * field + rank; }

  struct Decoded {
    bool base = false;  // true for x^mu; then field holds mu
    int field = 0;
    int order = 0;
    int rank = 0;
  };

  static constexpr Decoded decode(int id) {
    if (id < kDim) return {true, id, -1, 0};
    for (int r = 0; r <= MaxOrder; ++r) {
      if (id < offset(r + 1)) {
        const int local = id - offset(r);
        return {false, local / deriv_count(r), r, local % deriv_count(r)};
      }
    }
    return {false, -1, -1, -1};
  }

  static constexpr int order_of(int id) { return id < kDim ? 0 : decode(id).order; }

  /// Id of the coordinate obtained by differentiating `id` once more along
  /// tau. Base coordinates have no shift (returns -1).
  static constexpr int shift(int id, int tau) {
    const Decoded d = decode(id);
    if (d.base) return -1;
    const DerivString s = deriv_string(d.order, d.rank).with(tau);
    return FieldLayout::id(d.field, d.order + 1, deriv_rank(s));
  }
};

using EHLayout = FieldLayout<10, 3, 4>;
using EPLayout = FieldLayout<74, 1, 2>;

/// Coordinate ids on J^3 pi.
namespace eh {
constexpr int x(int mu) { return mu; }
constexpr int g(int a, int b) { return EHLayout::id(pair_index(a, b), 0, 0); }
constexpr int dg(int a, int b, int mu) { return EHLayout::id(pair_index(a, b), 1, mu); }
constexpr int d2g(int a, int b, int mu, int nu) { return EHLayout::id(pair_index(a, b), 2, deriv_rank_of(mu, nu)); }
constexpr int d3g(int a, int b, int mu, int nu, int la) {
  return EHLayout::id(pair_index(a, b), 3, deriv_rank_of(mu, nu, la));
}
constexpr int d4g(int a, int b, int mu, int nu, int la, int ta) {
  return EHLayout::id(pair_index(a, b), 4, deriv_rank_of(mu, nu, la, ta));
}
}  // namespace eh

/// Coordinate ids on J^1 Pi. Connection components are fields 10..73 with
/// component index 16 l + 4 m + n for Gamma^l_{mn}.
namespace ep {
constexpr int gamma_index(int l, int m, int n) { return 16 * l + 4 * m + n; }
constexpr int x(int mu) { return mu; }
constexpr int g(int a, int b) { return EPLayout::id(pair_index(a, b), 0, 0); }
constexpr int Gamma(int l, int m, int n) { return EPLayout::id(10 + gamma_index(l, m, n), 0, 0); }
constexpr int dg(int a, int b, int rho) { return EPLayout::id(pair_index(a, b), 1, rho); }
constexpr int dGamma(int l, int m, int n, int rho) { return EPLayout::id(10 + gamma_index(l, m, n), 1, rho); }
constexpr int ddg(int a, int b, int rho, int tau) { return EPLayout::id(pair_index(a, b), 2, deriv_rank_of(rho, tau)); }
constexpr int ddGamma(int l, int m, int n, int rho, int tau) {
  return EPLayout::id(10 + gamma_index(l, m, n), 2, deriv_rank_of(rho, tau));
}
}  // namespace ep

/// Human-readable label of a coordinate id, e.g. "g_01,23" or "Gamma^1_00,2".
template <class Layout>
std::string coordinate_label(int id) {
  const auto d = Layout::decode(id);
  if (d.base) return "x" + std::to_string(d.field);
  std::string s;
  if (d.field < 10) {
    const auto [a, b] = pair_of(d.field);
    s = "g_" + std::to_string(a) + std::to_string(b);
  } else {
    const int k = d.field - 10;
    s = "Gamma^" + std::to_string(k / 16) + "_" + std::to_string((k / 4) % 4) + std::to_string(k % 4);
  }
  if (d.order > 0) {
    s += ",";
    const auto& ds = deriv_string(d.order, d.rank);
    for (int i = 0; i < ds.length; ++i) s += std::to_string(ds[i]);
  }
  return s;
}

/// Stored jet point: coordinates 0 .. dim(order)-1 of the layout.
template <class Layout, class T = double>
class Jet {
 public:
  using layout = Layout;
  using scalar_type = T;

  Jet(int order, std::vector<T> coords) : order_(order), c_(std::move(coords)) {
    if (order < 0 || order > Layout::max_order) throw UsageError("jet order out of range");
    if (c_.size() != static_cast<std::size_t>(Layout::dim(order))) {
      throw UsageError("jet coordinate count " + std::to_string(c_.size()) + " does not match order " +
                       std::to_string(order) + " (expected " + std::to_string(Layout::dim(order)) + ")");
    }
  }

  int order() const noexcept { return order_; }
  int dim() const noexcept { return static_cast<int>(c_.size()); }
  bool extended() const noexcept { return order_ > Layout::space_order; }

  const T& operator[](int id) const { return c_[static_cast<std::size_t>(id)]; }

  const T& at(int id) const {
    if (id < 0 || id >= dim()) {
      throw UsageError("coordinate " + std::to_string(id) + " not present in a jet of order " +
                       std::to_string(order_));
    }
    return c_[static_cast<std::size_t>(id)];
  }

  std::span<const T> coords() const noexcept { return c_; }

  /// Copy with the coordinate `id` replaced.
  Jet with(int id, const T& v) const {
    Jet j = *this;
    j.c_.at(static_cast<std::size_t>(id)) = v;
    return j;
  }

  /// Drop blocks above `order`.
  Jet truncated(int order) const {
    if (order > order_) throw UsageError("cannot raise the order of a jet");
    std::vector<T> c(c_.begin(), c_.begin() + Layout::dim(order));
    return Jet(order, std::move(c));
  }

 private:
  int order_;
  std::vector<T> c_;
};

using EHJetPoint = Jet<EHLayout, double>;
using EPJetPoint = Jet<EPLayout, double>;

/// View of a jet in which coordinate ids listed in `seeds` carry unit
/// tangents in slot 0..W-1. Only blocks up to `order` are visible.
template <class Base, int W>
class SeededJet {
 public:
  using layout = typename Base::layout;
  using base_scalar = typename Base::scalar_type;
  using scalar_type = Dual<base_scalar, W>;

  SeededJet(const Base& base, int order, std::span<const int> seeds) : base_(&base), order_(order) {
    if (order > base.order()) throw UsageError("seeded view deeper than the underlying jet");
    slot_.assign(static_cast<std::size_t>(layout::dim(order)), -1);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const int id = seeds[k];
      if (id >= 0 && id < layout::dim(order)) slot_[static_cast<std::size_t>(id)] = static_cast<int>(k);
    }
  }

  int order() const noexcept { return order_; }

  scalar_type operator[](int id) const {
    check(id);
    scalar_type v((*base_)[id]);
    const int s = slot_[static_cast<std::size_t>(id)];
    if (s >= 0) v.set_tangent(s, base_scalar(1.0));
    return v;
  }

 private:
  void check(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= slot_.size()) {
      throw UsageError("fiber function read coordinate " + std::to_string(id) + " beyond its declared jet order " +
                       std::to_string(order_));
    }
  }

  const Base* base_;
  int order_;
  std::vector<int> slot_;
};

/// View of a jet whose coordinates carry arbitrary tangent directions:
/// tangent slot k of coordinate id is dirs[k][id].
template <class Base, int W>
class DirectionalJet {
 public:
  using layout = typename Base::layout;
  using base_scalar = typename Base::scalar_type;
  using scalar_type = Dual<base_scalar, W>;

  DirectionalJet(const Base& base, int order, const std::array<std::vector<base_scalar>, W>& dirs)
      : base_(&base), order_(order), dirs_(&dirs) {
    if (order > base.order()) throw UsageError("directional view deeper than the underlying jet");
    for (const auto& d : dirs) {
      if (d.size() != static_cast<std::size_t>(layout::dim(order))) {
        throw UsageError("direction vector length does not match the jet dimension");
      }
    }
  }

  int order() const noexcept { return order_; }

  scalar_type operator[](int id) const {
    if (id < 0 || id >= layout::dim(order_)) {
      throw UsageError("fiber function read coordinate " + std::to_string(id) + " beyond its declared jet order " +
                       std::to_string(order_));
    }
    scalar_type v((*base_)[id]);
    for (int k = 0; k < W; ++k) {
      const auto& t = (*dirs_)[static_cast<std::size_t>(k)][static_cast<std::size_t>(id)];
      if (value_of(t) != 0.0 || is_dual_v<base_scalar>) v.set_tangent(k, t);
    }
    return v;
  }

 private:
  const Base* base_;
  int order_;
  const std::array<std::vector<base_scalar>, W>* dirs_;
};

/// Values and partial derivatives of a vector-valued fiber function.
template <class T, std::size_t M>
struct FiberJacobian {
  std::array<T, M> value;
  std::vector<int> coords;
  std::vector<T> d;  // row-major: d[i * coords.size() + j] = d f_i / d coords[j]

  const T& at(std::size_t i, std::size_t j) const { return d[i * coords.size() + j]; }
};

/// Exact partials of every output of f with respect to the listed ordered
/// coordinates, evaluated in chunks of W tangent directions. Coordinates of
/// jet order above F::jet_order get exact zeros: f cannot read them.
template <int W = 16, class F, class J>
FiberJacobian<typename J::scalar_type, F::outputs> jacobian(const F& f, const J& p, std::span<const int> coords) {
  using T = typename J::scalar_type;
  using L = typename J::layout;
  constexpr std::size_t M = F::outputs;
  if (p.order() < F::jet_order) throw UsageError("jet point has lower order than the fiber function reads");

  FiberJacobian<T, M> out;
  out.coords.assign(coords.begin(), coords.end());
  out.d.assign(M * coords.size(), T{});

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (coords[j] < 0 || coords[j] >= L::dim(L::max_order)) throw UsageError("invalid coordinate id");
    if (L::order_of(coords[j]) <= F::jet_order) active.push_back(j);
  }

  if (active.empty()) {
    std::array<int, 0> none{};
    SeededJet<J, 1> view(p, F::jet_order, none);
    const auto r = f(view);
    for (std::size_t i = 0; i < M; ++i) out.value[i] = r[i].value();
    return out;
  }

  for (std::size_t start = 0; start < active.size(); start += W) {
    const std::size_t len = std::min<std::size_t>(W, active.size() - start);
    std::array<int, W> seeds;
    seeds.fill(-1);
    for (std::size_t k = 0; k < len; ++k) seeds[k] = coords[active[start + k]];
    SeededJet<J, W> view(p, F::jet_order, seeds);
    const auto r = f(view);
    for (std::size_t i = 0; i < M; ++i) {
      if (start == 0) out.value[i] = r[i].value();
      for (std::size_t k = 0; k < len; ++k) {
        out.d[i * coords.size() + active[start + k]] = r[i].tangent(static_cast<int>(k));
      }
    }
  }
  return out;
}

/// Single exact fiber partial. No multiplicity factors are applied.
template <class F, class J>
std::array<typename J::scalar_type, F::outputs> fiber_partial(const F& f, int coord, const J& p) {
  const std::array<int, 1> c{coord};
  const auto jac = jacobian<1>(f, p, c);
  std::array<typename J::scalar_type, F::outputs> out;
  for (std::size_t i = 0; i < F::outputs; ++i) out[i] = jac.d[i];
  return out;
}

/// Directional derivatives of f along W tangent vectors given over the
/// coordinates of order <= F::jet_order.
template <int W, class F, class J>
std::array<std::array<typename J::scalar_type, F::outputs>, W + 1> directional_derivatives(
    const F& f, const J& p, const std::array<std::vector<typename J::scalar_type>, W>& dirs) {
  DirectionalJet<J, W> view(p, F::jet_order, dirs);
  const auto r = f(view);
  std::array<std::array<typename J::scalar_type, F::outputs>, W + 1> out;
  for (std::size_t i = 0; i < F::outputs; ++i) {
    out[0][i] = r[i].value();
    for (int k = 0; k < W; ++k) out[static_cast<std::size_t>(k + 1)][i] = r[i].tangent(k);
  }
  return out;
}

/// Components of the total-derivative vector field D_tau at p over the
/// coordinates of order <= `order`: 1 on x^tau and, on each field coordinate
/// u, the coordinate of u differentiated once more along tau. Requires p to
/// carry order + 1.
template <class J>
std::vector<typename J::scalar_type> total_derivative_vector(const J& p, int tau, int order) {
  using L = typename J::layout;
  using T = typename J::scalar_type;
  if (p.order() < order + 1) {
    throw UsageError("total derivative needs jet order " + std::to_string(order + 1) + ", point has " +
                     std::to_string(p.order()));
  }
  std::vector<T> v(static_cast<std::size_t>(L::dim(order)), T{});
  v[static_cast<std::size_t>(tau)] = T(1.0);
  for (int id = kDim; id < L::dim(order); ++id) v[static_cast<std::size_t>(id)] = p[L::shift(id, tau)];
  return v;
}

/// D_tau f for tau = 0..3 in one pass: result[0] holds f itself,
/// result[1 + tau] holds D_tau f.
template <class F, class J>
std::array<std::array<typename J::scalar_type, F::outputs>, 5> total_derivatives(const F& f, const J& p) {
  std::array<std::vector<typename J::scalar_type>, 4> dirs;
  for (int tau = 0; tau < 4; ++tau) dirs[static_cast<std::size_t>(tau)] = total_derivative_vector(p, tau, F::jet_order);
  return directional_derivatives<4>(f, p, dirs);
}

template <class F, class J>
std::array<typename J::scalar_type, F::outputs> total_derivative(const F& f, int tau, const J& p) {
  if (tau < 0 || tau > 3) throw UsageError("total derivative direction must be 0..3");
  std::array<std::vector<typename J::scalar_type>, 1> dirs{total_derivative_vector(p, tau, F::jet_order)};
  return directional_derivatives<1>(f, p, dirs)[1];
}

// ---------------------------------------------------------------------------
// Construction and validation of double-valued points.

/// Throws DegenerateMetricError unless the symmetric matrix g has one
/// negative and three positive eigenvalues and |det g| >= 1e-14.
void require_lorentzian(const std::array<std::array<double, 4>, 4>& g);

template <class J>
std::array<std::array<double, 4>, 4> metric_at(const J& p) {
  std::array<std::array<double, 4>, 4> g{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = value_of(p[eh::g(a, b)]);
  }
  return g;
}

inline EHJetPoint make_eh_point(int order, std::vector<double> coords) {
  EHJetPoint p(order, std::move(coords));
  require_lorentzian(metric_at(p));
  return p;
}

inline EPJetPoint make_ep_point(int order, std::vector<double> coords) {
  EPJetPoint p(order, std::move(coords));
  require_lorentzian(metric_at(p));  // g ids coincide in both layouts
  return p;
}

namespace detail {

inline void check_series_family(std::span<const JetScalar> series, int need_order) {
  for (const auto& s : series) {
    if (!s.compatible(series.front())) throw UsageError("field series have mixed base points or truncation orders");
  }
  if (series.front().order() < need_order) {
    throw UsageError("series truncation order " + std::to_string(series.front().order()) +
                     " too low for jet order " + std::to_string(need_order));
  }
}

template <class Layout>
std::vector<double> prolong_coords(std::span<const JetScalar> fields, int order) {
  std::vector<double> c(static_cast<std::size_t>(Layout::dim(order)), 0.0);
  const BasePoint& x = fields.front().base_point();
  for (int mu = 0; mu < 4; ++mu) c[static_cast<std::size_t>(mu)] = x[static_cast<std::size_t>(mu)];
  for (int r = 0; r <= order; ++r) {
    for (int f = 0; f < Layout::fields; ++f) {
      for (int k = 0; k < deriv_count(r); ++k) {
        const MultiIndex m{deriv_string(r, k).exponents()};
        c[static_cast<std::size_t>(Layout::id(f, r, k))] = fields[static_cast<std::size_t>(f)].derivative(m);
      }
    }
  }
  return c;
}

}  // namespace detail

/// j^order of a metric section given as 10 series (ordered pairs a<=b).
inline EHJetPoint prolong(std::span<const JetScalar> metric, int order) {
  if (metric.size() != 10) throw UsageError("prolong expects 10 metric component series");
  if (order < 0 || order > EHLayout::max_order) throw UsageError("EH prolongation order must be 0..4");
  detail::check_series_family(metric, order);
  return make_eh_point(order, detail::prolong_coords<EHLayout>(metric, order));
}

/// j^1 of a metric-affine section (order 2 adds the extension block used by
/// tangent lifts). `connection` holds Gamma^l_mn at index 16 l + 4 m + n.
inline EPJetPoint prolong_ep(std::span<const JetScalar> metric, std::span<const JetScalar> connection, int order) {
  if (metric.size() != 10 || connection.size() != 64) {
    throw UsageError("prolong_ep expects 10 metric and 64 connection series");
  }
  if (order < 0 || order > EPLayout::max_order) throw UsageError("EP prolongation order must be 0..2");
  std::vector<JetScalar> fields;
  fields.reserve(74);
  const int k = std::min(metric.front().order(), connection.front().order());
  for (const auto& s : metric) fields.push_back(s.order() > k ? s.truncated(k) : s);
  for (const auto& s : connection) fields.push_back(s.order() > k ? s.truncated(k) : s);
  detail::check_series_family(fields, order);
  return make_ep_point(order, detail::prolong_coords<EPLayout>(fields, order));
}

}  // namespace msgr

#include "msgr/detail/lorentzian.hpp"
