#pragma once

// Truncated multivariate Taylor series in the four base coordinates.
//
// A JetScalar holds the Taylor coefficients (derivative / m!) of a function
// of (x0, x1, x2, x3) around a base point, for every multi-index of total
// degree <= K. Storage is dense in graded-lexicographic order, so the
// coefficients of degree <= K' < K form a prefix of the array.

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "msgr/errors.hpp"

namespace msgr {

inline constexpr int kMaxTruncationOrder = 6;
inline constexpr int kDefaultTruncationOrder = 4;

using BasePoint = std::array<double, 4>;

struct MultiIndex {
  std::array<int, 4> e{};

  constexpr int degree() const { return e[0] + e[1] + e[2] + e[3]; }
  constexpr int operator[](int i) const { return e[static_cast<std::size_t>(i)]; }

  /// m! = e0! e1! e2! e3!
  constexpr double factorial() const {
    double f = 1.0;
    for (int v : e) {
      for (int k = 2; k <= v; ++k) f *= k;
    }
    return f;
  }

  constexpr MultiIndex plus(int dir) const {
    MultiIndex m = *this;
    ++m.e[static_cast<std::size_t>(dir)];
    return m;
  }

  friend constexpr bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

namespace detail {

constexpr int monomial_count(int k) {
  // C(k + 4, 4)
  return (k + 1) * (k + 2) * (k + 3) * (k + 4) / 24;
}

constexpr int mi_code(const MultiIndex& m) {
  return m.e[0] + 7 * (m.e[1] + 7 * (m.e[2] + 7 * m.e[3]));
}

struct TaylorTables {
  std::vector<MultiIndex> monomials;  // graded lex, up to kMaxTruncationOrder
  std::vector<int> lookup;            // code -> position, -1 if absent
  // Product triples (i, j, i*j) whose degrees sum to <= K, one list per K.
  std::array<std::vector<std::array<int, 3>>, kMaxTruncationOrder + 1> products;

  int index_of(const MultiIndex& m) const { return lookup[static_cast<std::size_t>(mi_code(m))]; }
};

inline TaylorTables build_taylor_tables() {
  TaylorTables t;
  t.lookup.assign(7 * 7 * 7 * 7, -1);
  for (int d = 0; d <= kMaxTruncationOrder; ++d) {
    // Descending lexicographic order on the exponent vector within a degree.
    for (int a = d; a >= 0; --a) {
      for (int b = d - a; b >= 0; --b) {
        for (int c = d - a - b; c >= 0; --c) {
          MultiIndex m{{a, b, c, d - a - b - c}};
          t.lookup[static_cast<std::size_t>(mi_code(m))] = static_cast<int>(t.monomials.size());
          t.monomials.push_back(m);
        }
      }
    }
  }
  for (int k = 0; k <= kMaxTruncationOrder; ++k) {
    const int n = monomial_count(k);
    auto& list = t.products[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) {
      const auto& mi = t.monomials[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const auto& mj = t.monomials[static_cast<std::size_t>(j)];
        if (mi.degree() + mj.degree() > k) continue;
        MultiIndex sum;
        for (int q = 0; q < 4; ++q) sum.e[static_cast<std::size_t>(q)] = mi[q] + mj[q];
        list.push_back({i, j, t.index_of(sum)});
      }
    }
  }
  return t;
}

inline const TaylorTables& taylor_tables() {
  static const TaylorTables tables = build_taylor_tables();
  return tables;
}

}  // namespace detail

class JetScalar {
 public:
  /// Placeholder constant 0 of order 0 at the origin; only useful as a slot
  /// to be assigned, since arithmetic with other series will refuse to mix.
  JetScalar() : JetScalar(0, BasePoint{}) {}

  JetScalar(int order, const BasePoint& base) : order_(order), base_(base) {
    if (order < 0 || order > kMaxTruncationOrder) {
      throw UsageError("truncation order " + std::to_string(order) + " outside [0, " +
                       std::to_string(kMaxTruncationOrder) + "]");
    }
    coeffs_.assign(static_cast<std::size_t>(detail::monomial_count(order)), 0.0);
  }

  static JetScalar constant(double value, const BasePoint& base, int order = kDefaultTruncationOrder) {
    JetScalar s(order, base);
    s.coeffs_[0] = value;
    return s;
  }

  /// The coordinate function x_dir expanded around the base point.
  static JetScalar variable(int dir, const BasePoint& base, int order = kDefaultTruncationOrder) {
    JetScalar s = constant(base[static_cast<std::size_t>(dir)], base, order);
    if (order >= 1) s.coeffs_[static_cast<std::size_t>(1 + dir)] = 1.0;
    return s;
  }

  static JetScalar from_coefficients(int order, const BasePoint& base, std::span<const double> coeffs) {
    JetScalar s(order, base);
    if (coeffs.size() != s.coeffs_.size()) throw UsageError("coefficient count does not match truncation order");
    std::copy(coeffs.begin(), coeffs.end(), s.coeffs_.begin());
    return s;
  }

  int order() const noexcept { return order_; }
  const BasePoint& base_point() const noexcept { return base_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  double value() const noexcept { return coeffs_[0]; }

  double coeff(const MultiIndex& m) const {
    if (m.degree() > order_) return 0.0;
    return coeffs_[static_cast<std::size_t>(detail::taylor_tables().index_of(m))];
  }

  /// Partial derivative d^|m| f / dx^m at the base point.
  double derivative(const MultiIndex& m) const { return coeff(m) * m.factorial(); }

  JetScalar truncated(int order) const {
    if (order > order_) throw UsageError("cannot raise the truncation order of a series");
    JetScalar s(order, base_);
    std::copy_n(coeffs_.begin(), s.coeffs_.size(), s.coeffs_.begin());
    return s;
  }

  bool compatible(const JetScalar& o) const noexcept { return order_ == o.order_ && base_ == o.base_; }

  JetScalar operator-() const {
    JetScalar r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  JetScalar& operator+=(const JetScalar& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  JetScalar& operator-=(const JetScalar& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  JetScalar& operator*=(const JetScalar& o) { return *this = *this * o; }
  JetScalar& operator/=(const JetScalar& o) { return *this = *this / o; }

  JetScalar& operator+=(double v) {
    coeffs_[0] += v;
    return *this;
  }
  JetScalar& operator-=(double v) {
    coeffs_[0] -= v;
    return *this;
  }
  JetScalar& operator*=(double v) {
    for (auto& c : coeffs_) c *= v;
    return *this;
  }
  JetScalar& operator/=(double v) {
    for (auto& c : coeffs_) c /= v;
    return *this;
  }

  friend JetScalar operator+(JetScalar a, const JetScalar& b) { return a += b; }
  friend JetScalar operator-(JetScalar a, const JetScalar& b) { return a -= b; }
  friend JetScalar operator+(JetScalar a, double b) { return a += b; }
  friend JetScalar operator+(double a, JetScalar b) { return b += a; }
  friend JetScalar operator-(JetScalar a, double b) { return a -= b; }
  friend JetScalar operator-(double a, const JetScalar& b) { return (-b) += a; }
  friend JetScalar operator*(JetScalar a, double b) { return a *= b; }
  friend JetScalar operator*(double a, JetScalar b) { return b *= a; }
  friend JetScalar operator/(JetScalar a, double b) { return a /= b; }
  friend JetScalar operator/(double a, const JetScalar& b) { return reciprocal(b) *= a; }

  friend JetScalar operator*(const JetScalar& a, const JetScalar& b) {
    a.check(b);
    JetScalar r(a.order_, a.base_);
    for (const auto& [i, j, k] : detail::taylor_tables().products[static_cast<std::size_t>(a.order_)]) {
      r.coeffs_[static_cast<std::size_t>(k)] +=
          a.coeffs_[static_cast<std::size_t>(i)] * b.coeffs_[static_cast<std::size_t>(j)];
    }
    return r;
  }

  friend JetScalar operator/(const JetScalar& a, const JetScalar& b) {
    a.check(b);
    return a * reciprocal(b);
  }

  friend JetScalar reciprocal(const JetScalar& b) {
    const double b0 = b.value();
    if (b0 == 0.0) throw SingularPointError("series division by a series with zero constant term");
    std::vector<double> c(static_cast<std::size_t>(b.order_) + 1);
    double p = 1.0 / b0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = (k % 2 == 0) ? p : -p;
      p /= b0;
    }
    return b.compose(c);
  }

  friend JetScalar sqrt(const JetScalar& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) {
      throw SingularPointError("series square root of a nonpositive constant term (" + std::to_string(a0) + ")");
    }
    // binom(1/2, k) a0^(1/2 - k)
    std::vector<double> c(static_cast<std::size_t>(a.order_) + 1);
    double binom = 1.0;
    double power = std::sqrt(a0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = binom * power;
      binom *= (0.5 - static_cast<double>(k)) / static_cast<double>(k + 1);
      power /= a0;
    }
    return a.compose(c);
  }

  friend JetScalar exp(const JetScalar& a) {
    std::vector<double> c(static_cast<std::size_t>(a.order_) + 1);
    double v = std::exp(a.value());
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = v;
      v /= static_cast<double>(k + 1);
    }
    return a.compose(c);
  }

  friend JetScalar log(const JetScalar& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw SingularPointError("series logarithm of a nonpositive constant term");
    std::vector<double> c(static_cast<std::size_t>(a.order_) + 1);
    c[0] = std::log(a0);
    double p = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      p /= a0;
      c[k] = ((k % 2 == 1) ? p : -p) / static_cast<double>(k);
    }
    return a.compose(c);
  }

  friend JetScalar sin(const JetScalar& a) { return a.compose(trig_coeffs(a, 0)); }
  friend JetScalar cos(const JetScalar& a) { return a.compose(trig_coeffs(a, 1)); }

  friend JetScalar abs(const JetScalar& a) { return a.value() < 0.0 ? -a : a; }

  friend JetScalar pow(const JetScalar& a, int n) {
    if (n < 0) return reciprocal(pow(a, -n));
    JetScalar r = constant(1.0, a.base_, a.order_);
    JetScalar base = a;
    while (n > 0) {
      if (n & 1) r = r * base;
      n >>= 1;
      if (n > 0) base = base * base;
    }
    return r;
  }

  /// d/dx_dir; the result is truncated one order lower.
  friend JetScalar series_partial(const JetScalar& a, int dir) {
    if (a.order_ == 0) throw UsageError("cannot differentiate a series of truncation order 0");
    if (dir < 0 || dir > 3) throw UsageError("partial derivative direction must be 0..3");
    const auto& t = detail::taylor_tables();
    JetScalar r(a.order_ - 1, a.base_);
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i) {
      const MultiIndex& m = t.monomials[i];
      r.coeffs_[i] = static_cast<double>(m[dir] + 1) *
                     a.coeffs_[static_cast<std::size_t>(t.index_of(m.plus(dir)))];
    }
    return r;
  }

 private:
  void check(const JetScalar& o) const {
    if (order_ != o.order_) throw UsageError("series arithmetic between different truncation orders");
    if (base_ != o.base_) throw UsageError("series arithmetic between different base points");
  }

  static std::vector<double> trig_coeffs(const JetScalar& a, int phase) {
    // k-th derivative of sin is sin(x + k pi/2); cos shifts by one step.
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const std::array<double, 4> cycle{s, c, -s, -c};
    std::vector<double> out(static_cast<std::size_t>(a.order_) + 1);
    double fact = 1.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      out[k] = cycle[(k + static_cast<std::size_t>(phase)) % 4] / fact;
    }
    return out;
  }

  /// f(a0 + u) = sum_k c_k u^k with u = a - a0; terms beyond K vanish.
  JetScalar compose(const std::vector<double>& c) const {
    JetScalar u = *this;
    u.coeffs_[0] = 0.0;
    JetScalar r = constant(c.back(), base_, order_);
    for (std::size_t k = c.size() - 1; k-- > 0;) {
      r = r * u;
      r.coeffs_[0] += c[k];
    }
    return r;
  }

  int order_;
  BasePoint base_;
  std::vector<double> coeffs_;
};

inline double value_of(const JetScalar& s) { return s.value(); }
inline JetScalar zero_like(const JetScalar& s) { return JetScalar(s.order(), s.base_point()); }

/// Coordinate series x0..x3 around a base point.
inline std::array<JetScalar, 4> coordinate_series(const BasePoint& base, int order = kDefaultTruncationOrder) {
  return {JetScalar::variable(0, base, order), JetScalar::variable(1, base, order),
          JetScalar::variable(2, base, order), JetScalar::variable(3, base, order)};
}

}  // namespace msgr
