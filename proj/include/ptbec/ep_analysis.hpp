#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ptbec/gpe.hpp"
#include "ptbec/matrix_model.hpp"
#include "ptbec/types.hpp"

namespace ptbec::ep {

/// AppendixEps varies the perturbation of the appendix matrix at fixed y.
enum class ContourParameter { Gamma, AsymmetryA, ModelGamma, AppendixY, AppendixEps };

enum class Orientation { CounterClockwise, Clockwise };

const char* to_string(ContourParameter p) noexcept;
ContourParameter contour_parameter_from_string(const std::string& name);

struct ContourSpec {
  ContourParameter parameter = ContourParameter::ModelGamma;
  Complex center;
  double radius = 0.04;
  int n_steps = 64;
  int turns = 1;
  Orientation orientation = Orientation::CounterClockwise;

  void validate() const;
  /// Parameter value after the fraction `s` of one turn.
  Complex point(double s) const;
};

/// Maps a complex parameter to a fixed number of spectral values.
class SpectrumProvider {
 public:
  virtual ~SpectrumProvider() = default;
  virtual std::vector<std::string> labels() const = 0;
  virtual std::vector<Complex> evaluate(Complex parameter) = 0;
};

/// E2, E3, E4 of the matrix model as functions of complex gamma.
class MatrixModelProvider : public SpectrumProvider {
 public:
  explicit MatrixModelProvider(double g) : g_(g) {}
  std::vector<std::string> labels() const override;
  std::vector<Complex> evaluate(Complex gamma) override;
  /// Unit eigenvectors in the order of evaluate().
  std::vector<Vector3c> vectors(Complex gamma) const;

 private:
  double g_;
};

/// Eigenvalues of the appendix matrix; the parameter is y or eps.
class AppendixProvider : public SpectrumProvider {
 public:
  AppendixProvider(ContourParameter which, Complex fixed) : which_(which), fixed_(fixed) {}
  std::vector<std::string> labels() const override;
  std::vector<Complex> evaluate(Complex parameter) override;

 private:
  ContourParameter which_;
  Complex fixed_;
};

class FunctionProvider : public SpectrumProvider {
 public:
  FunctionProvider(std::vector<std::string> labels,
                   std::function<std::vector<Complex>(Complex)> fn)
      : labels_(std::move(labels)), fn_(std::move(fn)) {}
  std::vector<std::string> labels() const override { return labels_; }
  std::vector<Complex> evaluate(Complex parameter) override { return fn_(parameter); }

 private:
  std::vector<std::string> labels_;
  std::function<std::vector<Complex>(Complex)> fn_;
};

/// Recombined kappa of a set of continued GPE states. Each evaluation
/// transports every state along the straight segment from the previously
/// evaluated parameter, so consecutive calls must stay close.
class GpeProvider : public SpectrumProvider {
 public:
  GpeProvider(gpe::GpeConfig base, ContourParameter which, Complex start,
              std::vector<gpe::BoundState> states, std::vector<std::string> labels);
  std::vector<std::string> labels() const override { return labels_; }
  std::vector<Complex> evaluate(Complex parameter) override;
  const std::vector<gpe::BoundState>& states() const { return states_; }
  gpe::GpeConfig config_at(Complex parameter) const;

 private:
  gpe::GpeConfig base_;
  ContourParameter which_;
  Complex current_;
  std::vector<gpe::BoundState> states_;
  std::vector<std::string> labels_;
};

/// Ground state and PT-broken pair at real gamma above gamma_cr, embedded in
/// the fully continued mode. Labels: ground, broken+, broken-.
std::vector<gpe::BoundState> triple_point_states(const gpe::GpeConfig& cfg);

/// The two real states that exist below gamma_cr only in the fully continued
/// mode. The broken pair at gamma_cr + detour is carried over the upper half
/// plane to gamma_cr - detour and then along the real axis to cfg.gamma.
std::vector<gpe::BoundState> hidden_pair(const gpe::GpeConfig& cfg, double gamma_cr,
                                         double detour = 0.04);

/// Provider positioned at the start of a gamma circle. The circle must cross
/// the real axis above gamma_cr at its starting point.
std::unique_ptr<GpeProvider> gamma_contour_provider(const gpe::GpeConfig& cfg,
                                                    const ContourSpec& spec);

/// Provider positioned at the start of an asymmetry circle at cfg.gamma. The
/// three states are brought there from gamma + detour at A = 0 through the
/// upper half of the complex gamma plane.
std::unique_ptr<GpeProvider> asymmetry_contour_provider(const gpe::GpeConfig& cfg,
                                                        const ContourSpec& spec,
                                                        double detour = 0.04);

struct BranchTrace {
  std::vector<std::string> labels;
  std::vector<Complex> parameters;
  /// Row per recorded step, column per branch.
  Eigen::MatrixXcd values;
  /// Provider index holding each branch at each recorded step.
  std::vector<std::vector<int>> order;
  bool matched = false;
  int refinements = 0;
};

/// Follows all branches once around the contour (or `turns` times), matching
/// each step by minimal total distance. Steps are bisected while the best
/// assignment is ambiguous. Throws CardinalityChange or AmbiguousMatching.
BranchTrace trace_contour(SpectrumProvider& provider, const ContourSpec& spec,
                          int max_depth = 12);

enum class Classification { Identity, Ep2Pair, Ep3Cycle, Other };
const char* to_string(Classification c) noexcept;

struct PermutationResult {
  /// mapping[i] = j: the branch starting as label i ends on the start value of j.
  std::vector<int> mapping;
  /// Cycle lengths in descending order.
  std::vector<int> cycle_structure;
  Classification classification = Classification::Other;
};

PermutationResult classify(const BranchTrace& trace);

PermutationResult permutation_from_mapping(std::vector<int> mapping);

/// Eigenvector monodromy of the matrix model along a traced contour, from
/// column overlaps after phase normalization.
PermutationResult eigenvector_permutation(const MatrixModelProvider& provider,
                                          const BranchTrace& trace);

// ---------------------------------------------------------------------------
// Appendix

Matrix3c appendix_matrix(Complex y, Complex eps);

/// Exact eigenvalues, from the characteristic polynomial shifted by 1.
std::vector<Complex> appendix_eigenvalues(Complex y, Complex eps);

struct ExpansionFit {
  /// Mean of the per-branch slopes of log|E - E(0)| against log eps.
  double slope = 0.0;
  std::vector<double> slopes;
  /// c_k in E_k = E_k(0) - c_k eps^p with p = 1/3 at y = 1 and 1 elsewhere;
  /// ordered by descending argument at y = 1.
  std::vector<Complex> prefactors;
  double fit_residual = 0.0;
};

/// Throws FitFailure when the log-log fit leaves an rms residual above 1e-2.
ExpansionFit appendix_expansion_check(const std::vector<double>& eps_grid, double y = 1.0);

/// First-order coefficients dE_k/deps at eps = 0 for E1 = 1, E2 = 1 + sqrt(1-y),
/// E3 = 1 - sqrt(1-y).
std::vector<Complex> appendix_linear_response(double y);

}  // namespace ptbec::ep
