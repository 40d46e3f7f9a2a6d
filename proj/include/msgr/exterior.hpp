#pragma once

// Pointwise exterior algebra for 5-forms on a jet space.
//
// A form is kept as a list of wedge monomials. Each monomial carries a
// coefficient and exactly five covector factors; a factor is either the
// differential of a single coordinate or a dense covector (the differential
// of some fiber function, stored over all ambient coordinates). Contracting
// a monomial with four tangent vectors leaves a covector, obtained by
// expanding the 5x5 pairing determinant along its free column.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msgr/errors.hpp"

namespace msgr {

struct CoordDifferential {
  int id = 0;
};

struct DenseCovector {
  std::shared_ptr<const std::vector<double>> components;

  static DenseCovector from(std::vector<double> c) {
    return DenseCovector{std::make_shared<const std::vector<double>>(std::move(c))};
  }
};

using Covector = std::variant<CoordDifferential, DenseCovector>;
using TangentVector = std::vector<double>;
using CotangentVector = std::vector<double>;

struct FormTerm {
  double coefficient = 1.0;
  std::array<Covector, 5> factors;

  /// The same monomial with factors i and j exchanged, hence negated.
  FormTerm swapped(std::size_t i, std::size_t j) const {
    FormTerm t = *this;
    if (i != j) {
      std::swap(t.factors.at(i), t.factors.at(j));
      t.coefficient = -t.coefficient;
    }
    return t;
  }
};

/// i(d/dx^mu) (dx^0 ^ dx^1 ^ dx^2 ^ dx^3) as a sign and three differentials.
struct VolumeSlice {
  double sign;
  std::array<CoordDifferential, 3> factors;
};

inline VolumeSlice d3x(int mu) {
  if (mu < 0 || mu > 3) throw UsageError("d3x index must be 0..3");
  VolumeSlice s{(mu % 2 == 0) ? 1.0 : -1.0, {}};
  std::size_t k = 0;
  for (int i = 0; i < 4; ++i) {
    if (i != mu) s.factors[k++] = CoordDifferential{i};
  }
  return s;
}

namespace detail {

inline double pairing(const Covector& c, std::span<const double> v) {
  if (const auto* cd = std::get_if<CoordDifferential>(&c)) return v[static_cast<std::size_t>(cd->id)];
  const auto& dense = *std::get<DenseCovector>(c).components;
  double acc = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) acc += dense[i] * v[i];
  return acc;
}

inline void check_dim(const Covector& c, std::size_t dim) {
  if (const auto* cd = std::get_if<CoordDifferential>(&c)) {
    if (cd->id < 0 || static_cast<std::size_t>(cd->id) >= dim) {
      throw UsageError("coordinate differential d" + std::to_string(cd->id) + " outside the ambient space");
    }
    return;
  }
  const auto& p = std::get<DenseCovector>(c).components;
  if (!p || p->size() != dim) throw UsageError("dense covector length does not match the ambient dimension");
}

inline double det4(const std::array<std::array<double, 4>, 4>& m) {
  const double s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
  const double s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
  const double s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
  const double s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
  const double s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
  const double s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
  const double c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
  const double c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
  const double c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
  const double c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
  const double c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
  const double c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

inline void accumulate(const Covector& c, double w, CotangentVector& out) {
  if (w == 0.0) return;
  if (const auto* cd = std::get_if<CoordDifferential>(&c)) {
    out[static_cast<std::size_t>(cd->id)] += w;
    return;
  }
  const auto& dense = *std::get<DenseCovector>(c).components;
  for (std::size_t i = 0; i < dense.size(); ++i) out[i] += w * dense[i];
}

}  // namespace detail

using TangentFrame = std::array<std::span<const double>, 4>;

/// Adds t(v1, v2, v3, v4, .) to `out`.
inline void contract_term_into(const FormTerm& t, const TangentFrame& v, CotangentVector& out) {
  const std::size_t dim = out.size();
  for (const auto& vi : v) {
    if (vi.size() != dim) throw UsageError("tangent vector length does not match the ambient dimension");
  }
  std::array<std::array<double, 4>, 5> pm{};
  for (std::size_t k = 0; k < 5; ++k) {
    detail::check_dim(t.factors[k], dim);
    for (std::size_t i = 0; i < 4; ++i) pm[k][i] = detail::pairing(t.factors[k], v[i]);
  }
  for (std::size_t k = 0; k < 5; ++k) {
    std::array<std::array<double, 4>, 4> minor{};
    std::size_t r = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      if (j != k) minor[r++] = pm[j];
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    detail::accumulate(t.factors[k], t.coefficient * sign * detail::det4(minor), out);
  }
}

inline CotangentVector contract_term(const FormTerm& t, const TangentFrame& v, std::size_t dim) {
  CotangentVector out(dim, 0.0);
  contract_term_into(t, v, out);
  return out;
}

/// i(v4) i(v3) i(v2) i(v1) applied to a sum of monomials.
inline CotangentVector contract(std::span<const FormTerm> terms, const TangentFrame& v, std::size_t dim) {
  CotangentVector out(dim, 0.0);
  for (const auto& t : terms) contract_term_into(t, v, out);
  return out;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// A 5-form as assembled by the models, with its ambient dimension.
struct FiveForm {
  std::size_t dim = 0;
  std::vector<FormTerm> terms;

  CotangentVector contract(const TangentFrame& v) const { return msgr::contract(terms, v, dim); }
};

}  // namespace msgr
