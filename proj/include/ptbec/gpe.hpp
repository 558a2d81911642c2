#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ptbec/bicomplex.hpp"
#include "ptbec/types.hpp"

namespace ptbec::gpe {

/// How the nonlinear density |psi|^2 is continued.
///
/// Naive keeps psi conj(psi). PtContinued replaces it by psi(x) psi(-x).
/// FullContinuation promotes the real and imaginary parts of psi and kappa to
/// complex numbers; internally that is carried out on the two idempotent
/// components (psi1, psi2) with density psi1 psi2.
enum class Mode { Naive, PtContinued, FullContinuation };

enum class PtClass { Symmetric, Broken };

const char* to_string(Mode mode) noexcept;
Mode mode_from_string(const std::string& name);
const char* to_string(PtClass c) noexcept;

struct GpeConfig {
  double g = 1.0;
  Complex gamma{0.0, 0.0};
  double a = 2.2;
  Complex asym{0.0, 0.0};
  Mode mode = Mode::Naive;
  /// Outer cutoff. Zero selects a/2 + 12/Re(kappa) from the initial guess.
  double x_max = 0.0;
  double ode_tol = 1e-12;
  double newton_tol = 1e-10;
  double symmetry_tol = 1e-6;
  int max_newton_iterations = 60;
  /// Re-solve at 1.5 x_max and require the kappa shift to stay below 1e-9.
  bool adapt_cutoff = true;
  /// Spacing of the returned wave-function grid; <= 0 skips sampling.
  double sample_step = 0.02;

  void validate() const;
};

/// Coefficients c of -c*delta(x -+ a/2) felt by one idempotent component.
/// Component 2 is the physical equation: left 1 + i gamma + A, right
/// 1 - i gamma - A. Component 1 is its j-conjugate partner.
struct WellStrengths {
  Complex left;
  Complex right;
};
WellStrengths well_strengths(const GpeConfig& cfg, int component = 2);

/// psi'(x0+) = psi'(x0-) - strength * psi(x0).
Complex delta_jump(Complex psi, Complex dpsi_left, Complex strength);
Bicomplex delta_jump(const Bicomplex& psi, const Bicomplex& dpsi_left, const Bicomplex& strength);

// ---------------------------------------------------------------------------
// Segment integration

struct SegmentPoint {
  double x = 0.0;
  Complex psi;
  Complex dpsi;
};

/// Value and derivative, with respect to x, of the mirror profile psi(-x) at
/// the start of a segment.
struct MirrorData {
  Complex psi;
  Complex dpsi;
};

struct SegmentResult {
  Complex psi;
  Complex dpsi;
  std::optional<MirrorData> mirror;
  std::vector<SegmentPoint> samples;
};

/// Integrates psi'' = kappa^2 psi - g N psi over a delta-free interval.
/// Naive uses N = |psi|^2. PtContinued needs the mirror profile psi(-x), which
/// is propagated alongside and returned in `mirror`.
SegmentResult integrate_segment(Complex kappa, Complex psi0, Complex dpsi0, double x0, double x1,
                                const GpeConfig& cfg,
                                std::optional<MirrorData> companion = std::nullopt);

struct BicomplexSegmentResult {
  Bicomplex psi;
  Bicomplex dpsi;
};

/// Fully continued system: the two coupled real-part/imaginary-part equations
/// with every component complexified.
BicomplexSegmentResult integrate_segment(const Bicomplex& kappa, const Bicomplex& psi0,
                                         const Bicomplex& dpsi0, double x0, double x1,
                                         const GpeConfig& cfg);

// ---------------------------------------------------------------------------
// Shooting residual
//
// Unknown layouts (amplitudes multiply exp(-kappa (|x| - a/2)) beyond x_max):
//   Naive:        [Re k, Im k, Re B_L, Im B_L, B_R]                       (5)
//   PtContinued:  [Re k, Im k, Re B_L, Im B_L, Re B_R, Im B_R]            (6)
//   Full:         [Re k1, Im k1, Re k2, Im k2, Re B1_L, Im B1_L,
//                  Re B2_L, Im B2_L, Re B_R, Im B_R]                      (10)
// In the full mode the right amplitudes of both components are tied to B_R,
// fixing the gauge (psi1, psi2) -> (c psi1, psi2 / c).

int unknown_count(Mode mode);

struct ResidualVector {
  VectorXr components;
};

double default_cutoff(const GpeConfig& cfg, const VectorXr& unknowns);

ResidualVector residual(const VectorXr& unknowns, const GpeConfig& cfg);

struct Linearization {
  VectorXr residual;
  MatrixXr jacobian;
};

/// Residual together with its Jacobian from forward sensitivity equations.
Linearization linearize(const VectorXr& unknowns, const GpeConfig& cfg, double x_max);

/// Recombined kappa (the physical component) encoded in an unknown vector.
Complex kappa_of(const VectorXr& unknowns, Mode mode);
Bicomplex kappa_components_of(const VectorXr& unknowns, Mode mode);

// ---------------------------------------------------------------------------
// Bound states

struct WaveSample {
  double x = 0.0;
  Bicomplex psi;
};

struct BoundState {
  Mode mode = Mode::Naive;
  Complex kappa;
  Bicomplex kappa_components;
  std::vector<WaveSample> psi;
  /// Integral of |psi|^2 over the physical component.
  double norm = 0.0;
  /// The continued normalization integral of the active mode.
  Complex continued_norm;
  PtClass pt_class = PtClass::Symmetric;
  double symmetry_defect = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  double x_max = 0.0;
  VectorXr unknowns;
};

BoundState solve_bound_state(const GpeConfig& cfg, const VectorXr& guess);

/// Recomputes wave function and diagnostics for already converged unknowns.
BoundState evaluate_state(const GpeConfig& cfg, const VectorXr& unknowns, double x_max);

/// Re-expresses a state's unknowns for another mode. Naive states embed in
/// both continued modes; PtContinued states embed in the full mode.
VectorXr convert_unknowns(const VectorXr& unknowns, Mode from, Mode to);

// ---------------------------------------------------------------------------
// Linear limit

/// Bound-state kappa of the g = 0 problem, Re kappa > 0, sorted by Re kappa
/// descending. Roots of (2k - c_L)(2k - c_R) = c_L c_R exp(-2 k a).
std::vector<Complex> linear_spectrum_oracle(double a, double gamma, Complex asym = {});

/// Naive-mode unknowns of the normalized g = 0 state with the given kappa.
VectorXr linear_state_unknowns(const GpeConfig& cfg, Complex kappa);

// ---------------------------------------------------------------------------
// Continuation

enum class SweepParameter { Gamma, G, Asymmetry };

struct Sweep {
  SweepParameter parameter = SweepParameter::Gamma;
  double start = 0.0;
  double stop = 0.0;
  int points = 2;
  /// Largest accepted kappa change between consecutive points.
  double continuity = 0.05;
  double min_step = 1e-7;
};

using ConfigPath = std::function<GpeConfig(double t)>;

/// Natural-parameter continuation of a seed along t in [0, 1], returning the
/// state at each of the `points` uniform nodes. Failed steps are halved; when
/// the step falls below `min_step` Errc::BranchLost is thrown with the last
/// good t in the message.
std::vector<BoundState> continue_path(const ConfigPath& path, const BoundState& seed, int points,
                                      double continuity = 0.05, double min_step = 1e-7);

std::vector<BoundState> continue_branch(const GpeConfig& cfg, const Sweep& sweep,
                                        const BoundState& seed);

/// Moves a state to the end of `path` without keeping intermediate points.
BoundState transport(const ConfigPath& path, const BoundState& seed, double continuity = 0.05,
                     double initial_step = 0.05);

GpeConfig with_parameter(GpeConfig cfg, SweepParameter p, double value);

// ---------------------------------------------------------------------------
// Branch-point detection

/// Ground state and first excited state (naive mode) at the given config,
/// reached by homotopy from the linear problem.
std::vector<BoundState> symmetric_pair(const GpeConfig& cfg);

/// Both members of the PT-broken pair (naive mode) at `cfg`, reached by a
/// homotopy in g from the linear complex pair at the same gamma. Throws
/// BranchLost when no broken pair exists there.
std::vector<BoundState> broken_pair(const GpeConfig& cfg);

struct CriticalPoints {
  double gamma_cr = 0.0;
  double gamma_bp = 0.0;
};

/// Bifurcation of the PT-broken pair from the ground state (gamma_cr) and the
/// merger of the two PT-symmetric states (gamma_bp), at real gamma.
CriticalPoints find_critical_points(const GpeConfig& cfg, double tol = 1e-6);

/// Sign of det J of the naive shooting system at a converged state.
double jacobian_determinant(const GpeConfig& cfg, const BoundState& state);

}  // namespace ptbec::gpe
