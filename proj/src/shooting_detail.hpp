#pragma once

// Internal half-line machinery shared by the shooting residual and the state
// evaluation. Every mode is reduced to integrating x in [0, x_max] inwards:
// functions on x > 0 are psi(x); those for x < 0 are carried as psi(-x) on the
// same half-line, which makes the psi(x) psi(-x) density local.

#include <array>
#include <vector>

#include "ptbec/gpe.hpp"

namespace ptbec::gpe::detail {

enum class Coupling {
  Modulus,  // one function, density |f|^2
  Product,  // two functions, density f0 f1
};

struct Channel {
  Complex kappa;
  Complex strength;
  Complex amplitude;
};

struct HalfLine {
  Coupling coupling = Coupling::Modulus;
  int n = 1;
  std::array<Channel, 2> ch{};
  /// Weights of |f_k|^2 in the physical norm integral.
  std::array<double, 2> physical{1.0, 0.0};
  double g = 0.0;
  double a = 2.2;
  double x_max = 20.0;
  double tol = 1e-12;
  /// Derivatives of kappa_k and amplitude_k along each real unknown (n x m).
  Eigen::MatrixXcd dkappa;
  Eigen::MatrixXcd damp;
};

struct SampleRow {
  double x = 0.0;
  std::array<Complex, 2> f{};
};

struct HalfLineResult {
  std::array<Complex, 2> f{};
  std::array<Complex, 2> df{};
  /// Integral of the coupling density over [0, inf).
  Complex integral;
  double physical_integral = 0.0;
  Eigen::MatrixXcd dF;
  Eigen::MatrixXcd ddF;
  Eigen::RowVectorXcd dIntegral;
  /// Ordered from x_max down to 0.
  std::vector<SampleRow> samples;
};

HalfLineResult integrate_half_line(const HalfLine& hl, double sample_step);

struct Evaluation {
  VectorXr residual;
  MatrixXr jacobian;
  Complex continued_norm;
  double physical_norm = 0.0;
  /// Naive and full: {right, left}; pt: a single coupled half-line.
  std::vector<HalfLineResult> halves;
};

Evaluation evaluate(const VectorXr& unknowns, const GpeConfig& cfg, double x_max,
                    bool with_jacobian, double sample_step);

}  // namespace ptbec::gpe::detail
