#pragma once

#include <vector>

#include <Eigen/Eigenvalues>

#include "ptbec/types.hpp"

namespace ptbec::detail {

// Roots of sum c[k] z^(n-k), highest power first, from the companion matrix
// followed by a few Newton steps on the polynomial itself.
inline std::vector<Complex> polynomial_roots(const std::vector<Complex>& c) {
  std::size_t lead = 0;
  while (lead < c.size() && c[lead] == 0.0) ++lead;
  const int n = static_cast<int>(c.size() - lead) - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -c[lead + 1 + j] / c[lead];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (Complex& z : roots) {
    for (int it = 0; it < 4; ++it) {
      Complex p = c[lead], dp = 0.0;
      for (int k = 1; k <= n; ++k) {
        dp = dp * z + p;
        p = p * z + c[lead + k];
      }
      if (dp == 0.0) break;
      const Complex step = p / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
  }
  return roots;
}

}  // namespace ptbec::detail
