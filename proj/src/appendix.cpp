#include <algorithm>
#include <cmath>
#include <numbers>

#include "polynomial.hpp"
#include "ptbec/ep_analysis.hpp"

namespace ptbec::ep {

Matrix3c appendix_matrix(Complex y, Complex eps) {
  Matrix3c m;
  m << 2.0 + eps, -1.0, 0.0,
       2.0 + y, -1.0, -y,
       -1.0, 0.0, 2.0;
  return m;
}

std::vector<Complex> appendix_eigenvalues(Complex y, Complex eps) {
  // det(M - (1 + z)) = -z^3 + eps z^2 + (eps + 1 - y) z - 2 eps
  std::vector<Complex> z = detail::polynomial_roots({1.0, -eps, -(eps + 1.0 - y), 2.0 * eps});
  for (Complex& v : z) v += 1.0;
  return z;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

ExpansionFit appendix_expansion_check(const std::vector<double>& eps_grid, double y) {
  if (eps_grid.size() < 3) throw Error(Errc::InvalidConfig, "need at least three eps values");
  const auto [lo, hi] = std::minmax_element(eps_grid.begin(), eps_grid.end());
  if (!(*lo > 0.0) || *hi > 1e-5 || *hi / *lo < 1e3 * (1.0 - 1e-12)) {
    throw Error(Errc::InvalidConfig, "eps grid must be positive, <= 1e-5 and span 3 decades");
  }
  const bool critical = y == 1.0;
  const double p = critical ? 1.0 / 3.0 : 1.0;
  std::vector<Complex> base;
  if (critical) {
    base = {1.0, 1.0, 1.0};
  } else {
    const Complex r = std::sqrt(Complex(1.0 - y));
    base = {1.0, 1.0 + r, 1.0 - r};
  }
  const double third = 2.0 * std::numbers::pi / 3.0;
  const std::vector<double> args{third, 0.0, -third};

  // shifts[k][i]: E_k(eps_i) - E_k(0)
  std::vector<std::vector<Complex>> shifts(3, std::vector<Complex>(eps_grid.size()));
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    const double eps = eps_grid[i];
    std::vector<Complex> e = appendix_eigenvalues(y, eps);
    std::vector<bool> used(3, false);
    for (int k = 0; k < 3; ++k) {
      int pick = -1;
      double bd = 1e300;
      for (int j = 0; j < 3; ++j) {
        if (used[j]) continue;
        double d;
        if (critical) {
          const Complex c = -(e[j] - 1.0) / std::cbrt(eps);
          d = std::abs(std::remainder(std::arg(c) - args[k], 2.0 * std::numbers::pi));
        } else {
          d = std::abs(e[j] - base[k]);
        }
        if (d < bd) {
          bd = d;
          pick = j;
        }
      }
      used[pick] = true;
      shifts[k][i] = e[pick] - base[k];
    }
  }

  ExpansionFit out;
  double ss = 0.0;
  std::vector<double> lx;
  for (double e : eps_grid) lx.push_back(std::log(e));
  for (int k = 0; k < 3; ++k) {
    std::vector<double> ly;
    for (const Complex& s : shifts[k]) {
      if (std::abs(s) == 0.0) throw Error(Errc::FitFailure, "branch does not move with eps");
      ly.push_back(std::log(std::abs(s)));
    }
    const LineFit f = fit_line(lx, ly);
    out.slopes.push_back(f.slope);
    ss += f.rms * f.rms;
    // -shift * eps^-p = c + d eps^p, least squares in the real variable eps^p.
    double sx = 0, sxx = 0;
    Complex sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      const double xe = std::pow(eps_grid[i], p);
      const Complex w = -shifts[k][i] / xe;
      sx += xe;
      sxx += xe * xe;
      sy += w;
      sxy += xe * w;
    }
    const double n = static_cast<double>(eps_grid.size());
    const Complex d = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.prefactors.push_back((sy - d * sx) / n);
  }
  out.slope = (out.slopes[0] + out.slopes[1] + out.slopes[2]) / 3.0;
  out.fit_residual = std::sqrt(ss / 3.0);
  if (!(out.fit_residual <= 1e-2)) {
    throw Error(Errc::FitFailure, "log-log rms residual " + std::to_string(out.fit_residual));
  }
  return out;
}

std::vector<Complex> appendix_linear_response(double y) {
  if (!(y < 1.0)) throw Error(Errc::InvalidConfig, "linear response needs y < 1");
  const double u = 1.0 - y;
  const double common = -(1.0 + y) / (2.0 * u);
  const double split = 1.0 / (2.0 * std::sqrt(u));
  return {2.0 / u, common + split, common - split};
}

}  // namespace ptbec::ep
