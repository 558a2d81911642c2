#include "ptbec/matrix_model.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "polynomial.hpp"

namespace ptbec::model {

double gamma_critical(double g) {
  if (!(g >= 0.0) || g > 2.0) throw Error(Errc::InvalidConfig, "gamma_cr needs 0 <= g <= 2");
  return std::sqrt(1.0 - 0.25 * g * g);
}

Complex level_splitting(const ModelParams& p) {
  const double g = p.g;
  const Complex den = p.gamma * p.gamma + 0.25 * g * g;
  if (den == 0.0) throw Error(Errc::DegenerateDenominator, "gamma^2 + g^2/4 vanishes");
  const Complex gc = std::sqrt(Complex(1.0 - 0.25 * g * g));
  const Complex num = std::abs(1.0 - p.gamma) <= std::abs(p.gamma - gc)
                          ? (1.0 - p.gamma) * (1.0 + p.gamma) - 0.25 * g * g
                          : (gc - p.gamma) * (gc + p.gamma);
  return p.gamma * std::sqrt(num / den);
}

ModelSpectrum eigenvalues(const ModelParams& p) {
  const Complex w = std::sqrt(1.0 - p.gamma * p.gamma);
  const Complex r = level_splitting(p);
  return {-w, w, 0.5 * p.g - r, 0.5 * p.g + r};
}

Matrix3c similarity_matrix(const ModelParams& p) {
  const Complex w = std::sqrt(1.0 - p.gamma * p.gamma);
  const Complex r = level_splitting(p);
  const Complex h = std::sqrt(Complex(0.5 * p.g));
  Matrix3c s;
  s << 1.0, w, w,
       1.0, 0.5 * p.g - r, 0.5 * p.g + r,
       1.0, (h - r) * (h - r), (h + r) * (h + r);
  return s;
}

Matrix3c eigenvectors(const ModelParams& p) {
  Matrix3c s = similarity_matrix(p);
  for (int j = 0; j < 3; ++j) {
    const double n = s.col(j).norm();
    if (n > 0.0) s.col(j) /= n;
  }
  return s;
}

namespace {

Matrix3c direct_ham(const ModelParams& p) {
  const ModelSpectrum e = eigenvalues(p);
  const Matrix3c s = eigenvectors(p);
  Eigen::JacobiSVD<Matrix3c> svd(s);
  const auto& sv = svd.singularValues();
  if (!(sv[2] > 1e-13 * sv[0])) {
    throw Error(Errc::SingularSimilarity, "similarity matrix is rank deficient");
  }
  const Vector3c j(e.e2, e.e3, e.e4);
  return s * j.asDiagonal() * s.fullPivLu().inverse();
}

// Neville extrapolation in delta^2 of the symmetric average around `center`.
Matrix3c extrapolate(double g, double center, std::span<const double> deltas) {
  if (deltas.size() < 2) throw Error(Errc::InvalidConfig, "need at least two deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] < deltas[i - 1]))) {
      throw Error(Errc::InvalidConfig, "deltas must be positive and decreasing");
    }
  }
  const std::size_t n = deltas.size();
  std::vector<Matrix3c> t(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = deltas[i] * deltas[i];
    t[i] = 0.5 * (direct_ham({g, center + deltas[i]}) + direct_ham({g, center - deltas[i]}));
  }
  Matrix3c previous = t[n - 1];
  for (std::size_t level = 1; level < n; ++level) {
    previous = t[n - 1];
    for (std::size_t i = n - 1; i >= level; --i) {
      t[i] = (x[i - level] * t[i] - x[i] * t[i - 1]) / (x[i - level] - x[i]);
    }
  }
  const Matrix3c& last = t[n - 1];
  const double scale = std::max(1.0, last.norm());
  const double change = (last - previous).norm();
  if (!(change <= 1e-7 * scale)) {
    throw Error(Errc::NonConvergentLimit,
                "extrapolants differ by " + std::to_string(change));
  }
  return last;
}

}  // namespace

Matrix3c build_ham(const ModelParams& p) {
  // At gamma = 0 the E3 and E4 columns coincide although ham stays regular.
  if (p.gamma == Complex(0.0, 0.0) && p.g > 0.0) {
    const std::vector<double> d = default_delta_sequence();
    return extrapolate(p.g, 0.0, d);
  }
  return direct_ham(p);
}

std::vector<double> default_delta_sequence() {
  std::vector<double> d;
  for (int k = 0; k <= 6; ++k) d.push_back(1e-3 * std::ldexp(1.0, -k));
  return d;
}

Matrix3c limit_ham(double g, std::span<const double> deltas) {
  return extrapolate(g, gamma_critical(g), deltas);
}

Matrix3c limit_ham(double g) {
  const std::vector<double> d = default_delta_sequence();
  return limit_ham(g, d);
}

int numerical_rank(const Matrix3c& m, double rel) {
  Eigen::JacobiSVD<Matrix3c> svd(m);
  const auto& sv = svd.singularValues();
  if (sv[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < 3; ++i) r += sv[i] > rel * sv[0] ? 1 : 0;
  return r;
}

int nilpotency_order(const Matrix3c& n, double tol) {
  Matrix3c p = Matrix3c::Identity();
  for (int k = 1; k <= 3; ++k) {
    p = p * n;
    if (p.norm() < tol) return k;
  }
  return 0;
}

double verify_two_mode(Complex e, const ModelParams& p) {
  if (p.gamma.imag() != 0.0) throw Error(Errc::InvalidConfig, "two-mode check needs real gamma");
  const double g = p.g;
  const double gamma = p.gamma.real();
  const Complex mu = e + 0.5 * g;
  const double a = mu.real();
  const double b = mu.imag() + gamma;
  // n1 |mu + i gamma - g n1|^2 = 1 - n1
  std::vector<double> occupations;
  if (g == 0.0) {
    occupations.push_back(1.0 / (a * a + b * b + 1.0));
  } else {
    for (Complex z : detail::polynomial_roots({g * g, -2.0 * a * g, a * a + b * b + 1.0, -1.0})) {
      if (std::abs(z.imag()) > 1e-9) continue;
      double n1 = z.real();
      for (int it = 0; it < 3; ++it) {
        const double f = n1 * ((a - g * n1) * (a - g * n1) + b * b) + n1 - 1.0;
        const double df = (a - g * n1) * (a - g * n1) + b * b - 2.0 * g * n1 * (a - g * n1) + 1.0;
        n1 -= f / df;
      }
      occupations.push_back(n1);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (double n1 : occupations) {
    if (!(n1 > 0.0 && n1 <= 1.0)) continue;
    const Complex phi1 = std::sqrt(n1);
    const Complex phi2 = (mu + kI * gamma - g * n1) * phi1;
    const Complex r1 = (-kI * gamma + g * std::norm(phi1) - mu) * phi1 + phi2;
    const Complex r2 = phi1 + (kI * gamma + g * std::norm(phi2) - mu) * phi2;
    const double norm_defect = std::norm(phi1) + std::norm(phi2) - 1.0;
    best = std::min(best, std::sqrt(std::norm(r1) + std::norm(r2) + norm_defect * norm_defect));
  }
  if (!std::isfinite(best)) throw Error(Errc::NoAmplitudeSolution, "no occupation in (0, 1]");
  return best;
}

Complex scalar_product_e4(const ModelParams& p) {
  const double g = p.g;
  const Complex gamma = p.gamma;
  if (g == 0.0) return std::sqrt(2.0 / (3.0 - gamma * gamma));
  const Complex r = level_splitting(p);
  const Complex w = std::sqrt(1.0 - gamma * gamma);
  const Complex h = std::sqrt(Complex(0.5 * g));
  const Complex num = 0.5 * g + w + r;
  const Complex q = h + r;
  const Complex e4 = 0.5 * g + r;
  const Complex den = std::sqrt(2.0) * std::sqrt(1.0 - gamma * gamma + q * q * q * q + e4 * e4);
  return num / den;
}

std::pair<double, double> scalar_product_series(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(Errc::InvalidConfig, "gamma must lie in [0, 1]");
  const double u = 1.0 - gamma * gamma;
  const double v = 3.0 - gamma * gamma;
  return {std::sqrt(2.0 / v), -2.0 * std::sqrt(u) / (v * std::sqrt(v))};
}

std::array<Vector3c, 2> limit_eigenvectors(LimitOrder order) {
  if (order == LimitOrder::GZeroFirst) {
    return {Vector3c(0.0, 0.0, 1.0), Vector3c(1.0, 1.0, 0.0)};
  }
  return {Vector3c(0.0, 1.0 + kI, 1.0), Vector3c(0.0, 1.0 - kI, 1.0)};
}

}  // namespace ptbec::model
