#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "ptbec/gpe.hpp"
#include "shooting_detail.hpp"

namespace ptbec::gpe {

namespace {

struct NewtonOutcome {
  VectorXr z;
  double norm = 0.0;
  int iterations = 0;
};

double residual_norm_or_inf(const VectorXr& z, const GpeConfig& cfg, double x_max) {
  try {
    return detail::evaluate(z, cfg, x_max, false, 0.0).residual.norm();
  } catch (const Error& e) {
    if (e.code() == Errc::NonDecaying || e.code() == Errc::StepUnderflow) {
      return std::numeric_limits<double>::infinity();
    }
    throw;
  }
}

NewtonOutcome newton(const GpeConfig& cfg, VectorXr z, double x_max) {
  for (int it = 0;; ++it) {
    const Linearization lin = linearize(z, cfg, x_max);
    const double fn = lin.residual.norm();
    if (fn <= cfg.newton_tol) return {std::move(z), fn, it};
    if (!std::isfinite(fn) || it >= cfg.max_newton_iterations) {
      throw Error(Errc::NoConvergence, "after " + std::to_string(it) +
                                           " iterations, residual norm " + std::to_string(fn));
    }
    Eigen::JacobiSVD<MatrixXr> svd(lin.jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 1e-13 * sv[0])) {
      throw Error(Errc::SingularJacobian,
                  "condition estimate " + std::to_string(sv[0] / sv[sv.size() - 1]));
    }
    const VectorXr dz = svd.solve(-lin.residual);
    double lambda = 1.0;
    for (;;) {
      VectorXr trial = z + lambda * dz;
      const double tn = residual_norm_or_inf(trial, cfg, x_max);
      if (tn < (1.0 - 1e-4 * lambda) * fn || (lambda == 1.0 && tn < fn)) {
        z = std::move(trial);
        break;
      }
      lambda *= 0.5;
      if (lambda < 1e-4) {
        std::ostringstream msg;
        msg << "line search stalled at residual norm " << fn << " after " << it << " iterations";
        throw Error(Errc::NoConvergence, msg.str());
      }
    }
  }
}

double kappa_shift(const VectorXr& a, const VectorXr& b, Mode mode) {
  double shift = std::abs(kappa_of(a, mode) - kappa_of(b, mode));
  if (mode == Mode::FullContinuation) {
    shift = std::max(shift, std::abs(Complex(a[0], a[1]) - Complex(b[0], b[1])));
  }
  return shift;
}

}  // namespace

BoundState solve_bound_state(const GpeConfig& cfg, const VectorXr& guess) {
  cfg.validate();
  if (guess.size() != unknown_count(cfg.mode)) {
    throw Error(Errc::InvalidConfig, "guess has the wrong dimension for this mode");
  }
  double x_max = cfg.x_max > 0.0 ? cfg.x_max : default_cutoff(cfg, guess);
  NewtonOutcome out = newton(cfg, guess, x_max);
  int iterations = out.iterations;
  if (cfg.x_max == 0.0 && cfg.adapt_cutoff) {
    for (int round = 0;; ++round) {
      const double wider = std::max(1.5 * x_max, default_cutoff(cfg, out.z));
      NewtonOutcome next = newton(cfg, out.z, wider);
      iterations += next.iterations;
      const double shift = kappa_shift(out.z, next.z, cfg.mode);
      out = std::move(next);
      x_max = wider;
      if (shift < 1e-9) break;
      if (round == 3) {
        throw Error(Errc::NoConvergence, "kappa still moves by " + std::to_string(shift) +
                                             " when the cutoff grows");
      }
    }
  }
  BoundState state = evaluate_state(cfg, out.z, x_max);
  state.iterations = iterations;
  return state;
}

BoundState evaluate_state(const GpeConfig& cfg, const VectorXr& z, double x_max) {
  cfg.validate();
  const bool keep = cfg.sample_step > 0.0;
  const double step = keep ? cfg.sample_step : 0.1;
  detail::Evaluation ev = detail::evaluate(z, cfg, x_max, false, step);

  BoundState st;
  st.mode = cfg.mode;
  st.unknowns = z;
  st.x_max = x_max;
  st.kappa = kappa_of(z, cfg.mode);
  st.kappa_components = kappa_components_of(z, cfg.mode);
  st.residual_norm = ev.residual.norm();
  st.continued_norm = ev.continued_norm;
  st.norm = ev.physical_norm;

  // Per grid point x >= 0 (ascending): idempotent components at +x and -x.
  struct Row {
    double x;
    Complex p1, p2, m1, m2;
  };
  std::vector<Row> rows;
  auto ascending = [](const std::vector<detail::SampleRow>& s) {
    return std::vector<detail::SampleRow>(s.rbegin(), s.rend());
  };
  switch (cfg.mode) {
    case Mode::Naive: {
      const auto R = ascending(ev.halves[0].samples);
      const auto L = ascending(ev.halves[1].samples);
      for (std::size_t i = 0; i < R.size(); ++i) {
        rows.push_back({R[i].x, std::conj(R[i].f[0]), R[i].f[0], std::conj(L[i].f[0]), L[i].f[0]});
      }
      break;
    }
    case Mode::PtContinued: {
      for (const auto& r : ascending(ev.halves[0].samples)) {
        rows.push_back({r.x, std::conj(r.f[0]), r.f[0], std::conj(r.f[1]), r.f[1]});
      }
      break;
    }
    case Mode::FullContinuation: {
      const auto R = ascending(ev.halves[0].samples);
      const auto L = ascending(ev.halves[1].samples);
      for (std::size_t i = 0; i < R.size(); ++i) {
        rows.push_back({R[i].x, R[i].f[0], R[i].f[1], L[i].f[0], L[i].f[1]});
      }
      break;
    }
  }

  // Gauge (psi1, psi2) -> (c psi1, psi2 / c). The phase of c brings the state
  // closest to its PT image, the modulus balances the two components.
  Complex num = 0.0;
  double n1 = 0.0, n2 = 0.0;
  for (const Row& r : rows) {
    num += std::conj(r.p1 * r.m1) + r.p2 * r.m2;
    n1 += std::norm(r.p1) + std::norm(r.m1);
    n2 += std::norm(r.p2) + std::norm(r.m2);
  }
  Complex c = 1.0;
  if (std::abs(num) > 0.0) c = std::sqrt(num / std::abs(num));
  if (cfg.mode == Mode::FullContinuation && n1 > 0.0) c *= std::pow(n2 / n1, 0.25);
  const Row& origin = rows.front();
  if ((origin.p2 / c).real() < 0.0 || ((origin.p2 / c).real() == 0.0 && (origin.p2 / c).imag() < 0.0)) c = -c;
  for (Row& r : rows) {
    r.p1 *= c;
    r.m1 *= c;
    r.p2 /= c;
    r.m2 /= c;
  }
  if (cfg.mode == Mode::FullContinuation) st.norm = ev.physical_norm / std::norm(c);

  double peak = 0.0, defect = 0.0;
  for (const Row& r : rows) {
    peak = std::max({peak, std::abs(r.p2), std::abs(r.m2)});
    // PT conjugates both units and reflects x: (psi1, psi2)(x) -> conj(psi1, psi2)(-x).
    defect = std::max({defect, std::abs(r.p1 - std::conj(r.m1)), std::abs(r.p2 - std::conj(r.m2))});
  }
  st.symmetry_defect = peak > 0.0 ? defect / peak : 0.0;
  st.pt_class = st.symmetry_defect <= cfg.symmetry_tol ? PtClass::Symmetric : PtClass::Broken;

  if (keep) {
    st.psi.reserve(2 * rows.size());
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      if (it->x == 0.0) continue;
      st.psi.push_back({-it->x, Bicomplex::from_components(it->m1, it->m2)});
    }
    for (const Row& r : rows) st.psi.push_back({r.x, Bicomplex::from_components(r.p1, r.p2)});
  }
  return st;
}

VectorXr convert_unknowns(const VectorXr& z, Mode from, Mode to) {
  if (z.size() != unknown_count(from)) {
    throw Error(Errc::InvalidConfig, "unknown vector does not match source mode");
  }
  if (from == to) return z;
  if (from == Mode::Naive && to == Mode::PtContinued) {
    VectorXr out(6);
    out << z[0], z[1], z[2], z[3], z[4], 0.0;
    return out;
  }
  if (from == Mode::Naive && to == Mode::FullContinuation) {
    // psi1 = conj(psi2); the right amplitude is real, so the gauge tie holds.
    VectorXr out(10);
    out << z[0], -z[1], z[0], z[1], z[2], -z[3], z[2], z[3], z[4], 0.0;
    return out;
  }
  if (from == Mode::PtContinued && to == Mode::FullContinuation) {
    // psi1(x) = psi(-x), psi2(x) = psi(x), then regauge so both right
    // amplitudes agree.
    const Complex bl(z[2], z[3]), br(z[4], z[5]);
    const Complex c = std::sqrt(br / bl);
    const Complex b1l = c * br, b2l = bl / c, b = c * bl;
    VectorXr out(10);
    out << z[0], z[1], z[0], z[1], b1l.real(), b1l.imag(), b2l.real(), b2l.imag(), b.real(),
        b.imag();
    return out;
  }
  throw Error(Errc::InvalidConfig, std::string("cannot convert ") + to_string(from) + " to " +
                                       to_string(to));
}

// ---------------------------------------------------------------------------

std::vector<Complex> linear_spectrum_oracle(double a, double gamma, Complex asym) {
  if (!(a > 0.0)) throw Error(Errc::InvalidConfig, "a must be > 0");
  const Complex cl = 1.0 + kI * gamma + asym;
  const Complex cr = 1.0 - kI * gamma - asym;
  auto det = [&](Complex k) { return (2.0 * k - cl) * (2.0 * k - cr) - cl * cr * std::exp(-2.0 * k * a); };
  auto ddet = [&](Complex k) {
    return 2.0 * (2.0 * k - cr) + 2.0 * (2.0 * k - cl) + 2.0 * a * cl * cr * std::exp(-2.0 * k * a);
  };
  std::vector<Complex> roots;
  for (int ir = 1; ir <= 40; ++ir) {
    for (int ii = -8; ii <= 8; ++ii) {
      Complex k(0.05 * ir, 0.125 * ii);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const Complex step = det(k) / ddet(k);
        k -= step;
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) break;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(k))) {
          ok = true;
          break;
        }
      }
      if (!ok || !(k.real() > 1e-6)) continue;
      if (std::abs(det(k)) > 1e-12) continue;
      const bool seen = std::any_of(roots.begin(), roots.end(),
                                    [&](Complex r) { return std::abs(r - k) < 1e-8; });
      if (!seen) roots.push_back(k);
    }
  }
  std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
    if (std::abs(x.real() - y.real()) > 1e-10) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return roots;
}

VectorXr linear_state_unknowns(const GpeConfig& cfg, Complex kappa) {
  GpeConfig lin = cfg;
  lin.g = 0.0;
  lin.mode = Mode::Naive;
  lin.validate();
  const WellStrengths s = well_strengths(lin, 2);
  // Right amplitude 1; the left one follows from the matching at -a/2.
  const Complex bl = (2.0 * kappa - s.right) * std::exp(kappa * lin.a) / s.left;
  VectorXr z(5);
  z << kappa.real(), kappa.imag(), bl.real(), bl.imag(), 1.0;
  const double x_max = lin.x_max > 0.0 ? lin.x_max : default_cutoff(lin, z);
  const double n = detail::evaluate(z, lin, x_max, false, 0.0).continued_norm.real();
  z.tail(3) /= std::sqrt(n);
  return z;
}

}  // namespace ptbec::gpe
