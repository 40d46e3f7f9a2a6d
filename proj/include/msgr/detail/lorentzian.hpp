#pragma once

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <string>

#include "msgr/errors.hpp"

namespace msgr {

inline void require_lorentzian(const std::array<std::array<double, 4>, 4>& g) {
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) m(a, b) = g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (!std::isfinite(m(a, b))) throw DegenerateMetricError("metric has non-finite components");
    }
  }
  const double det = m.determinant();
  if (std::abs(det) < 1e-14) {
    throw DegenerateMetricError("degenerate metric: |det g| = " + std::to_string(std::abs(det)));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(m, Eigen::EigenvaluesOnly);
  int negative = 0;
  for (int i = 0; i < 4; ++i) negative += solver.eigenvalues()(i) < 0.0 ? 1 : 0;
  if (negative != 1) {
    throw DegenerateMetricError("metric signature is not (-,+,+,+): " + std::to_string(negative) +
                                " negative eigenvalues");
  }
}

}  // namespace msgr
