#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "ptbec/gpe.hpp"

namespace ptbec::gpe {

namespace {

bool recoverable(Errc code) {
  return code == Errc::NoConvergence || code == Errc::SingularJacobian ||
         code == Errc::NonDecaying || code == Errc::StepUnderflow;
}

double state_distance(const BoundState& a, const BoundState& b) {
  double d = std::abs(a.kappa - b.kappa);
  if (a.mode == Mode::FullContinuation) {
    d = std::max(d, std::abs(a.kappa_components.first() - b.kappa_components.first()));
  }
  return d;
}

// Walks `cur` from t0 to t1 along the path with step halving.
BoundState advance(const ConfigPath& path, BoundState cur, double t0, double t1, double& h,
                   double continuity, double min_step) {
  const double h_nominal = h;
  double t = t0;
  VectorXr prev;
  double prev_t = t0;
  bool have_prev = false;
  while (t < t1) {
    const bool last = h >= t1 - t;
    const double step = last ? t1 - t : h;
    const double tn = last ? t1 : t + step;
    GpeConfig cfg = path(tn);
    cfg.mode = cur.mode;
    VectorXr guess = cur.unknowns;
    if (have_prev) guess += (cur.unknowns - prev) * (step / (t - prev_t));
    bool ok = false;
    try {
      BoundState next = solve_bound_state(cfg, guess);
      if (state_distance(next, cur) <= continuity) {
        prev = cur.unknowns;
        prev_t = t;
        have_prev = true;
        cur = std::move(next);
        t = tn;
        ok = true;
      }
    } catch (const Error& e) {
      if (!recoverable(e.code())) throw;
    }
    if (ok) {
      h = std::min(h_nominal, 2.0 * step);
    } else {
      h = 0.5 * step;
      if (h < min_step) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "last good t = " << t << ", kappa = " << cur.kappa;
        throw Error(Errc::BranchLost, msg.str());
      }
    }
  }
  return cur;
}

}  // namespace

GpeConfig with_parameter(GpeConfig cfg, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::Gamma: cfg.gamma = value; break;
    case SweepParameter::G: cfg.g = value; break;
    case SweepParameter::Asymmetry: cfg.asym = value; break;
  }
  return cfg;
}

std::vector<BoundState> continue_path(const ConfigPath& path, const BoundState& seed, int points,
                                      double continuity, double min_step) {
  if (points < 1) throw Error(Errc::InvalidConfig, "need at least one point");
  std::vector<BoundState> out{seed};
  double h = points > 1 ? 1.0 / (points - 1) : 1.0;
  for (int i = 1; i < points; ++i) {
    const double t0 = static_cast<double>(i - 1) / (points - 1);
    const double t1 = static_cast<double>(i) / (points - 1);
    h = std::min(h, t1 - t0);
    out.push_back(advance(path, out.back(), t0, t1, h, continuity, min_step));
    h = 1.0 / (points - 1);
  }
  return out;
}

std::vector<BoundState> continue_branch(const GpeConfig& cfg, const Sweep& sweep,
                                        const BoundState& seed) {
  if (sweep.points < 1) throw Error(Errc::InvalidConfig, "sweep needs at least one point");
  if (sweep.start == sweep.stop || sweep.points == 1) return {seed};
  ConfigPath path = [&](double t) {
    return with_parameter(cfg, sweep.parameter, sweep.start + t * (sweep.stop - sweep.start));
  };
  return continue_path(path, seed, sweep.points, sweep.continuity,
                       sweep.min_step / std::abs(sweep.stop - sweep.start));
}

BoundState transport(const ConfigPath& path, const BoundState& seed, double continuity,
                     double initial_step) {
  double h = initial_step;
  return advance(path, seed, 0.0, 1.0, h, continuity, 1e-7);
}

// ---------------------------------------------------------------------------

std::vector<BoundState> symmetric_pair(const GpeConfig& target) {
  GpeConfig base = target;
  base.mode = Mode::Naive;
  base.g = 0.0;
  base.gamma = 0.0;
  base.asym = 0.0;
  const std::vector<Complex> roots = linear_spectrum_oracle(base.a, 0.0);
  std::vector<BoundState> out;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, roots.size()); ++i) {
    BoundState s = solve_bound_state(base, linear_state_unknowns(base, roots[i]));
    if (target.g != 0.0) {
      s = transport([&](double t) { return with_parameter(base, SweepParameter::G, t * target.g); },
                    s, 0.05, 0.1);
    }
    GpeConfig with_g = base;
    with_g.g = target.g;
    if (target.gamma.real() != 0.0) {
      s = transport(
          [&](double t) { return with_parameter(with_g, SweepParameter::Gamma, t * target.gamma.real()); },
          s, 0.05, 0.1);
    }
    with_g.gamma = target.gamma.real();
    if (target.asym.real() != 0.0) {
      s = transport(
          [&](double t) { return with_parameter(with_g, SweepParameter::Asymmetry, t * target.asym.real()); },
          s, 0.05, 0.1);
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const BoundState& x, const BoundState& y) { return x.kappa.real() > y.kappa.real(); });
  return out;
}

std::vector<BoundState> broken_pair(const GpeConfig& target) {
  GpeConfig base = target;
  base.mode = Mode::Naive;
  base.g = 0.0;
  base.asym = 0.0;
  double gamma_start = target.gamma.real();
  std::vector<Complex> pair;
  for (int attempt = 0; attempt < 20 && pair.size() < 2; ++attempt) {
    pair.clear();
    for (Complex k : linear_spectrum_oracle(base.a, gamma_start)) {
      if (std::abs(k.imag()) > 1e-6) pair.push_back(k);
    }
    if (pair.size() < 2) gamma_start += 0.05;
  }
  if (pair.size() < 2) throw Error(Errc::BranchLost, "no complex pair in the linear problem");
  base.gamma = gamma_start;
  std::vector<BoundState> out;
  for (Complex k : pair) {
    BoundState s = solve_bound_state(base, linear_state_unknowns(base, k));
    if (target.g != 0.0) {
      s = transport([&](double t) { return with_parameter(base, SweepParameter::G, t * target.g); },
                    s, 0.05, 0.1);
    }
    GpeConfig with_g = base;
    with_g.g = target.g;
    if (gamma_start != target.gamma.real()) {
      const double g0 = gamma_start, g1 = target.gamma.real();
      s = transport(
          [&](double t) { return with_parameter(with_g, SweepParameter::Gamma, g0 + t * (g1 - g0)); },
          s, 0.05, 0.1);
    }
    if (std::abs(s.kappa.imag()) < 1e-6) {
      throw Error(Errc::BranchLost, "broken state collapsed onto a real branch");
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const BoundState& x, const BoundState& y) { return x.kappa.imag() > y.kappa.imag(); });
  return out;
}

double jacobian_determinant(const GpeConfig& cfg, const BoundState& state) {
  GpeConfig c = cfg;
  c.mode = state.mode;
  return linearize(state.unknowns, c, state.x_max).jacobian.determinant();
}

CriticalPoints find_critical_points(const GpeConfig& cfg, double tol) {
  GpeConfig base = cfg;
  base.mode = Mode::Naive;
  base.gamma = 0.0;
  base.asym = 0.0;
  std::vector<BoundState> pair = symmetric_pair(base);
  if (pair.size() < 2) throw Error(Errc::BranchLost, "need two PT-symmetric states");
  BoundState ground = pair[0], excited = pair[1];

  auto at = [&](double gamma) { return with_parameter(base, SweepParameter::Gamma, gamma); };
  auto move = [&](const BoundState& s, double from, double to) {
    return transport([&](double t) { return at(from + t * (to - from)); }, s, 0.05, 1.0);
  };
  auto sign = [&](const BoundState& s, double gamma) {
    return jacobian_determinant(at(gamma), s) > 0.0 ? 1 : -1;
  };

  double gamma = 0.0;
  double h = 0.01;
  const int sign0 = sign(ground, 0.0);
  bool have_cr = false;
  double gamma_cr = 0.0;
  struct Point {
    double gamma;
    double gap;
  };
  std::vector<Point> history{{0.0, std::abs(ground.kappa - excited.kappa)}};

  while (h >= 1e-5) {
    const double next = gamma + h;
    BoundState g_next, e_next;
    try {
      g_next = move(ground, gamma, next);
      e_next = move(excited, gamma, next);
    } catch (const Error& e) {
      if (e.code() != Errc::BranchLost) throw;
      h *= 0.5;
      continue;
    }
    if (std::abs(g_next.kappa.imag()) > 1e-8 || std::abs(e_next.kappa.imag()) > 1e-8 ||
        std::abs(g_next.kappa - e_next.kappa) < 1e-9) {
      h *= 0.5;
      continue;
    }
    if (!have_cr && sign(g_next, next) != sign0) {
      double lo = gamma, hi = next;
      BoundState s_lo = ground;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        BoundState s_mid = move(s_lo, lo, mid);
        if (sign(s_mid, mid) == sign0) {
          lo = mid;
          s_lo = std::move(s_mid);
        } else {
          hi = mid;
        }
      }
      gamma_cr = 0.5 * (lo + hi);
      have_cr = true;
    }
    gamma = next;
    ground = std::move(g_next);
    excited = std::move(e_next);
    history.push_back({gamma, std::abs(ground.kappa - excited.kappa)});
  }

  // Near the fold the gap closes like sqrt(gamma_bp - gamma).
  const std::size_t n = history.size();
  if (n < 3) throw Error(Errc::BranchLost, "too few points to locate the branch point");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - 3; i < n; ++i) {
    const double x = history[i].gamma, y = history[i].gap * history[i].gap;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  const double icept = (sy - slope * sx) / 3.0;
  CriticalPoints out;
  out.gamma_bp = -icept / slope;
  out.gamma_cr = have_cr ? gamma_cr : out.gamma_bp;
  return out;
}

}  // namespace ptbec::gpe
