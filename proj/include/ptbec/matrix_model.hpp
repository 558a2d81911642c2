#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ptbec/types.hpp"

namespace ptbec::model {

struct ModelParams {
  double g = 1.0;
  Complex gamma{0.0, 0.0};
};

struct ModelSpectrum {
  Complex e1, e2, e3, e4;
};

/// sqrt(1 - g^2/4); real for g <= 2.
double gamma_critical(double g);

/// gamma * sqrt((1 - gamma^2 - g^2/4) / (gamma^2 + g^2/4)) on the principal
/// branch, evaluated with the radicand factored through gamma_critical so the
/// root vanishes exactly there.
Complex level_splitting(const ModelParams& p);

/// Throws Errc::DegenerateDenominator when gamma^2 + g^2/4 = 0.
ModelSpectrum eigenvalues(const ModelParams& p);

/// Columns are the unnormalized eigenvectors of E2, E3, E4.
Matrix3c similarity_matrix(const ModelParams& p);

/// Eigenvectors of E2, E3, E4 scaled to unit length.
Matrix3c eigenvectors(const ModelParams& p);

/// s j s^-1 with j = diag(E2, E3, E4). At gamma = 0, where the E3 and E4
/// columns coincide, the value is extrapolated like limit_ham. Throws
/// Errc::SingularSimilarity when s is numerically rank deficient.
Matrix3c build_ham(const ModelParams& p);

/// 1e-3 * 2^-k, k = 0..6.
std::vector<double> default_delta_sequence();

/// ham at gamma_critical(g), extrapolated from symmetric averages at
/// gamma_cr +- delta with Richardson steps in delta^2. Throws
/// Errc::NonConvergentLimit when the last two extrapolants disagree.
Matrix3c limit_ham(double g, std::span<const double> deltas);
Matrix3c limit_ham(double g);

/// Rank from singular values above rel * sigma_max.
int numerical_rank(const Matrix3c& m, double rel = 1e-8);

/// Smallest k with ||n^k|| < tol, or 0 when none up to 3 qualifies.
int nilpotency_order(const Matrix3c& n, double tol = 1e-6);

/// Residual of the two-mode equations for the level E of the continued
/// spectrum. Solutions of the two-mode system carry the eigenvalue E + g/2.
/// Throws Errc::NoAmplitudeSolution when no occupation in (0, 1] fits.
double verify_two_mode(Complex e, const ModelParams& p);

/// Overlap of the normalized E4 eigenvectors at g and at g = 0.
Complex scalar_product_e4(const ModelParams& p);

/// Coefficients of g^0 and g^(1/2) in the small-g expansion of
/// scalar_product_e4 at fixed gamma.
std::pair<double, double> scalar_product_series(double gamma);

enum class LimitOrder { GZeroFirst, GammaOneFirst };

/// Eigenvector pair of the two positive levels in the given order of limits.
std::array<Vector3c, 2> limit_eigenvectors(LimitOrder order);

}  // namespace ptbec::model
