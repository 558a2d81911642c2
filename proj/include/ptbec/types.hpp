#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ptbec {

using Complex = std::complex<double>;

using VectorXr = Eigen::VectorXd;
using MatrixXr = Eigen::MatrixXd;
using VectorXc = Eigen::VectorXcd;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

inline constexpr Complex kI{0.0, 1.0};

enum class Errc {
  InvalidConfig,
  StepUnderflow,
  MissingCompanion,
  NonDecaying,
  NoConvergence,
  SingularJacobian,
  BranchLost,
  DegenerateDenominator,
  SingularSimilarity,
  NonConvergentLimit,
  NoAmplitudeSolution,
  CardinalityChange,
  AmbiguousMatching,
  FitFailure,
};

const char* to_string(Errc code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ptbec
