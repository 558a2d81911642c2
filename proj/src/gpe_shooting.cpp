#include <algorithm>
#include <array>
#include <cmath>

#include "ptbec/gpe.hpp"
#include "ptbec/ode.hpp"
#include "shooting_detail.hpp"

namespace ptbec::gpe {

const char* to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::Naive: return "naive";
    case Mode::PtContinued: return "pt";
    case Mode::FullContinuation: return "full";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "naive" || name == "NAIVE") return Mode::Naive;
  if (name == "pt" || name == "PT_CONTINUED") return Mode::PtContinued;
  if (name == "full" || name == "FULL_CONTINUATION") return Mode::FullContinuation;
  throw Error(Errc::InvalidConfig, "unknown mode '" + name + "'");
}

const char* to_string(PtClass c) noexcept {
  return c == PtClass::Symmetric ? "PT_SYMMETRIC" : "PT_BROKEN";
}

void GpeConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (!(g >= 0.0)) fail("g must be >= 0");
  if (!(a > 0.0)) fail("a must be > 0");
  if (x_max != 0.0 && !(x_max > 0.5 * a)) fail("x_max must exceed a/2");
  if (!(ode_tol > 0.0)) fail("ode_tol must be > 0");
  if (!(newton_tol > 0.0)) fail("newton_tol must be > 0");
  if (mode == Mode::Naive && (gamma.imag() != 0.0 || asym.imag() != 0.0)) {
    fail("naive mode needs real gamma and asymmetry");
  }
}

WellStrengths well_strengths(const GpeConfig& cfg, int component) {
  const Complex ig = kI * cfg.gamma;
  if (component == 2) return {1.0 + ig + cfg.asym, 1.0 - ig - cfg.asym};
  return {1.0 - ig + cfg.asym, 1.0 + ig - cfg.asym};
}

Complex delta_jump(Complex psi, Complex dpsi_left, Complex strength) {
  return dpsi_left - strength * psi;
}

Bicomplex delta_jump(const Bicomplex& psi, const Bicomplex& dpsi_left, const Bicomplex& strength) {
  return Bicomplex::from_components(
      delta_jump(psi.first(), dpsi_left.first(), strength.first()),
      delta_jump(psi.second(), dpsi_left.second(), strength.second()));
}

namespace detail {

namespace {

ode::Options ode_options(double tol) {
  ode::Options opt;
  opt.rtol = tol;
  opt.atol = 1e-9 * tol;
  opt.initial_step = 1e-3;
  return opt;
}

}  // namespace

HalfLineResult integrate_half_line(const HalfLine& hl, double sample_step) {
  const int n = hl.n;
  const int m = static_cast<int>(hl.dkappa.cols());
  const int S = 2 * n + 2;
  const int idx_int = 2 * n;
  const int idx_phys = 2 * n + 1;
  const double half = 0.5 * hl.a;
  const double X = hl.x_max;
  const double d = X - half;

  for (int k = 0; k < n; ++k) {
    if (!(hl.ch[k].kappa.real() > 0.0)) {
      throw Error(Errc::NonDecaying, "Re kappa must be positive");
    }
  }

  std::array<Complex, 2> K{};
  for (int k = 0; k < n; ++k) K[k] = hl.ch[k].kappa * hl.ch[k].kappa;
  Eigen::MatrixXcd dK(n, m);
  for (int k = 0; k < n; ++k) dK.row(k) = 2.0 * hl.ch[k].kappa * hl.dkappa.row(k);

  VectorXc y = VectorXc::Zero(S * (m + 1));
  for (int k = 0; k < n; ++k) {
    const Complex e = std::exp(-hl.ch[k].kappa * d);
    y[k] = hl.ch[k].amplitude * e;
    y[n + k] = -hl.ch[k].kappa * y[k];
    for (int j = 0; j < m; ++j) {
      const int off = (j + 1) * S;
      y[off + k] = (hl.damp(k, j) - hl.ch[k].amplitude * d * hl.dkappa(k, j)) * e;
      y[off + n + k] = -hl.dkappa(k, j) * y[k] - hl.ch[k].kappa * y[off + k];
    }
  }
  // Tail beyond x_max, where the profile is a pure exponential.
  if (hl.coupling == Coupling::Modulus) {
    const double rk = hl.ch[0].kappa.real();
    y[idx_int] = std::norm(y[0]) / (2.0 * rk);
    for (int j = 0; j < m; ++j) {
      const int off = (j + 1) * S;
      y[off + idx_int] = 2.0 * std::real(std::conj(y[0]) * y[off]) / (2.0 * rk) -
                         std::norm(y[0]) * hl.dkappa(0, j).real() / (2.0 * rk * rk);
    }
  } else {
    const Complex ks = hl.ch[0].kappa + hl.ch[1].kappa;
    y[idx_int] = y[0] * y[1] / ks;
    for (int j = 0; j < m; ++j) {
      const int off = (j + 1) * S;
      const Complex dks = hl.dkappa(0, j) + hl.dkappa(1, j);
      y[off + idx_int] = (y[off] * y[1] + y[0] * y[off + 1]) / ks - y[0] * y[1] * dks / (ks * ks);
    }
  }
  for (int k = 0; k < n; ++k) {
    y[idx_phys] += hl.physical[k] * std::norm(y[k]) / (2.0 * hl.ch[k].kappa.real());
  }

  const double g = hl.g;
  const bool modulus = hl.coupling == Coupling::Modulus;
  auto rhs = [&](double, const VectorXc& s) -> VectorXc {
    VectorXc ds(s.size());
    const Complex P = modulus ? Complex(std::norm(s[0]), 0.0) : s[0] * s[1];
    for (int k = 0; k < n; ++k) {
      ds[k] = s[n + k];
      ds[n + k] = (K[k] - g * P) * s[k];
    }
    ds[idx_int] = -P;
    double phys = 0.0;
    for (int k = 0; k < n; ++k) phys += hl.physical[k] * std::norm(s[k]);
    ds[idx_phys] = -phys;
    for (int j = 0; j < m; ++j) {
      const int off = (j + 1) * S;
      const Complex dP = modulus ? Complex(2.0 * std::real(std::conj(s[0]) * s[off]), 0.0)
                                 : s[off] * s[1] + s[0] * s[off + 1];
      for (int k = 0; k < n; ++k) {
        ds[off + k] = s[off + n + k];
        ds[off + n + k] = (dK(k, j) - g * dP) * s[k] + (K[k] - g * P) * s[off + k];
      }
      ds[off + idx_int] = -dP;
      ds[off + idx_phys] = 0.0;
    }
    return ds;
  };

  HalfLineResult out;
  std::vector<double> outer_stops, inner_stops;
  if (sample_step > 0.0) {
    const long top = static_cast<long>(std::floor(X / sample_step));
    for (long i = top; i >= 0; --i) {
      const double x = static_cast<double>(i) * sample_step;
      (x >= half ? outer_stops : inner_stops).push_back(x);
    }
    if (outer_stops.empty() || outer_stops.back() != half) outer_stops.push_back(half);
  }
  auto observe = [&](double x, const VectorXc& s) {
    SampleRow row;
    row.x = x;
    for (int k = 0; k < n; ++k) row.f[k] = s[k];
    out.samples.push_back(row);
  };

  const ode::Options opt = ode_options(hl.tol);
  y = ode::integrate(rhs, std::move(y), X, half, opt, outer_stops, observe);
  for (int k = 0; k < n; ++k) {
    // Integrating towards the origin: psi'(a/2 -) = psi'(a/2 +) + c psi(a/2).
    y[n + k] += hl.ch[k].strength * y[k];
    for (int j = 0; j < m; ++j) {
      const int off = (j + 1) * S;
      y[off + n + k] += hl.ch[k].strength * y[off + k];
    }
  }
  y = ode::integrate(rhs, std::move(y), half, 0.0, opt, inner_stops, observe);

  for (int k = 0; k < n; ++k) {
    out.f[k] = y[k];
    out.df[k] = y[n + k];
  }
  out.integral = y[idx_int];
  out.physical_integral = y[idx_phys].real();
  out.dF.resize(n, m);
  out.ddF.resize(n, m);
  out.dIntegral.resize(m);
  for (int j = 0; j < m; ++j) {
    const int off = (j + 1) * S;
    for (int k = 0; k < n; ++k) {
      out.dF(k, j) = y[off + k];
      out.ddF(k, j) = y[off + n + k];
    }
    out.dIntegral[j] = y[off + idx_int];
  }
  return out;
}

Evaluation evaluate(const VectorXr& z, const GpeConfig& cfg, double x_max, bool with_jacobian,
                    double sample_step) {
  const int nu = unknown_count(cfg.mode);
  if (z.size() != nu) {
    throw Error(Errc::InvalidConfig, "unknown vector has size " + std::to_string(z.size()) +
                                         ", mode needs " + std::to_string(nu));
  }
  const int m = with_jacobian ? nu : 0;
  Evaluation ev;
  ev.residual.resize(nu);
  ev.jacobian = MatrixXr::Zero(nu, m);

  auto put = [&](int row, Complex value, const Eigen::RowVectorXcd& grad) {
    ev.residual[row] = value.real();
    ev.residual[row + 1] = value.imag();
    if (m > 0) {
      ev.jacobian.row(row) = grad.real();
      ev.jacobian.row(row + 1) = grad.imag();
    }
  };

  HalfLine proto;
  proto.g = cfg.g;
  proto.a = cfg.a;
  proto.x_max = x_max;
  proto.tol = cfg.ode_tol;
  const WellStrengths s2 = well_strengths(cfg, 2);

  switch (cfg.mode) {
    case Mode::Naive: {
      const Complex kappa(z[0], z[1]);
      HalfLine right = proto, left = proto;
      right.coupling = left.coupling = Coupling::Modulus;
      right.n = left.n = 1;
      right.ch[0] = {kappa, s2.right, Complex(z[4], 0.0)};
      left.ch[0] = {kappa, s2.left, Complex(z[2], z[3])};
      right.physical = left.physical = {1.0, 0.0};
      right.dkappa = left.dkappa = Eigen::MatrixXcd::Zero(1, m);
      right.damp = left.damp = Eigen::MatrixXcd::Zero(1, m);
      if (m > 0) {
        right.dkappa(0, 0) = left.dkappa(0, 0) = 1.0;
        right.dkappa(0, 1) = left.dkappa(0, 1) = kI;
        left.damp(0, 2) = 1.0;
        left.damp(0, 3) = kI;
        right.damp(0, 4) = 1.0;
      }
      ev.halves.push_back(integrate_half_line(right, sample_step));
      ev.halves.push_back(integrate_half_line(left, sample_step));
      const HalfLineResult& R = ev.halves[0];
      const HalfLineResult& L = ev.halves[1];
      put(0, R.f[0] - L.f[0], m ? Eigen::RowVectorXcd(R.dF.row(0) - L.dF.row(0)) : Eigen::RowVectorXcd());
      put(2, R.df[0] + L.df[0],
          m ? Eigen::RowVectorXcd(R.ddF.row(0) + L.ddF.row(0)) : Eigen::RowVectorXcd());
      ev.residual[4] = R.integral.real() + L.integral.real() - 1.0;
      if (m > 0) ev.jacobian.row(4) = (R.dIntegral + L.dIntegral).real();
      ev.continued_norm = R.integral + L.integral;
      ev.physical_norm = R.physical_integral + L.physical_integral;
      break;
    }
    case Mode::PtContinued: {
      const Complex kappa(z[0], z[1]);
      HalfLine line = proto;
      line.coupling = Coupling::Product;
      line.n = 2;
      line.ch[0] = {kappa, s2.right, Complex(z[4], z[5])};
      line.ch[1] = {kappa, s2.left, Complex(z[2], z[3])};
      line.physical = {1.0, 1.0};
      line.dkappa = Eigen::MatrixXcd::Zero(2, m);
      line.damp = Eigen::MatrixXcd::Zero(2, m);
      if (m > 0) {
        line.dkappa.col(0).setConstant(1.0);
        line.dkappa.col(1).setConstant(kI);
        line.damp(1, 2) = 1.0;
        line.damp(1, 3) = kI;
        line.damp(0, 4) = 1.0;
        line.damp(0, 5) = kI;
      }
      ev.halves.push_back(integrate_half_line(line, sample_step));
      const HalfLineResult& H = ev.halves[0];
      auto row = [&](auto expr) { return m ? Eigen::RowVectorXcd(expr) : Eigen::RowVectorXcd(); };
      put(0, H.f[0] - H.f[1], row(H.dF.row(0) - H.dF.row(1)));
      put(2, H.df[0] + H.df[1], row(H.ddF.row(0) + H.ddF.row(1)));
      put(4, 2.0 * H.integral - 1.0, row(2.0 * H.dIntegral));
      ev.continued_norm = 2.0 * H.integral;
      ev.physical_norm = H.physical_integral;
      break;
    }
    case Mode::FullContinuation: {
      const Complex k1(z[0], z[1]), k2(z[2], z[3]);
      const WellStrengths s1 = well_strengths(cfg, 1);
      const Complex b_right(z[8], z[9]);
      HalfLine right = proto, left = proto;
      right.coupling = left.coupling = Coupling::Product;
      right.n = left.n = 2;
      right.ch[0] = {k1, s1.right, b_right};
      right.ch[1] = {k2, s2.right, b_right};
      left.ch[0] = {k1, s1.left, Complex(z[4], z[5])};
      left.ch[1] = {k2, s2.left, Complex(z[6], z[7])};
      right.physical = left.physical = {0.0, 1.0};
      right.dkappa = left.dkappa = Eigen::MatrixXcd::Zero(2, m);
      right.damp = left.damp = Eigen::MatrixXcd::Zero(2, m);
      if (m > 0) {
        for (HalfLine* h : {&right, &left}) {
          h->dkappa(0, 0) = 1.0;
          h->dkappa(0, 1) = kI;
          h->dkappa(1, 2) = 1.0;
          h->dkappa(1, 3) = kI;
        }
        left.damp(0, 4) = 1.0;
        left.damp(0, 5) = kI;
        left.damp(1, 6) = 1.0;
        left.damp(1, 7) = kI;
        right.damp(0, 8) = right.damp(1, 8) = 1.0;
        right.damp(0, 9) = right.damp(1, 9) = kI;
      }
      ev.halves.push_back(integrate_half_line(right, sample_step));
      ev.halves.push_back(integrate_half_line(left, sample_step));
      const HalfLineResult& R = ev.halves[0];
      const HalfLineResult& L = ev.halves[1];
      auto row = [&](auto expr) { return m ? Eigen::RowVectorXcd(expr) : Eigen::RowVectorXcd(); };
      for (int k = 0; k < 2; ++k) {
        put(4 * k, R.f[k] - L.f[k], row(R.dF.row(k) - L.dF.row(k)));
        put(4 * k + 2, R.df[k] + L.df[k], row(R.ddF.row(k) + L.ddF.row(k)));
      }
      put(8, R.integral + L.integral - 1.0, row(R.dIntegral + L.dIntegral));
      ev.continued_norm = R.integral + L.integral;
      ev.physical_norm = R.physical_integral + L.physical_integral;
      break;
    }
  }
  return ev;
}

}  // namespace detail

int unknown_count(Mode mode) {
  switch (mode) {
    case Mode::Naive: return 5;
    case Mode::PtContinued: return 6;
    case Mode::FullContinuation: return 10;
  }
  return 0;
}

Complex kappa_of(const VectorXr& z, Mode mode) {
  if (mode == Mode::FullContinuation) return {z[2], z[3]};
  return {z[0], z[1]};
}

Bicomplex kappa_components_of(const VectorXr& z, Mode mode) {
  if (mode == Mode::FullContinuation) {
    return Bicomplex::from_components({z[0], z[1]}, {z[2], z[3]});
  }
  return Bicomplex::from_ordinary({z[0], z[1]});
}

double default_cutoff(const GpeConfig& cfg, const VectorXr& z) {
  double slowest = z[0];
  if (cfg.mode == Mode::FullContinuation) slowest = std::min(z[0], z[2]);
  if (!(slowest > 0.0)) throw Error(Errc::NonDecaying, "Re kappa must be positive");
  return 0.5 * cfg.a + 12.0 / slowest;
}

ResidualVector residual(const VectorXr& unknowns, const GpeConfig& cfg) {
  cfg.validate();
  const double x_max = cfg.x_max > 0.0 ? cfg.x_max : default_cutoff(cfg, unknowns);
  return {detail::evaluate(unknowns, cfg, x_max, false, 0.0).residual};
}

Linearization linearize(const VectorXr& unknowns, const GpeConfig& cfg, double x_max) {
  detail::Evaluation ev = detail::evaluate(unknowns, cfg, x_max, true, 0.0);
  return {std::move(ev.residual), std::move(ev.jacobian)};
}

// ---------------------------------------------------------------------------

SegmentResult integrate_segment(Complex kappa, Complex psi0, Complex dpsi0, double x0, double x1,
                                const GpeConfig& cfg, std::optional<MirrorData> companion) {
  cfg.validate();
  const double half = 0.5 * cfg.a;
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);
  if ((lo < half && half < hi) || (lo < -half && -half < hi)) {
    throw Error(Errc::InvalidConfig, "segment crosses a delta well");
  }
  if (cfg.mode == Mode::FullContinuation) {
    throw Error(Errc::InvalidConfig, "use the bicomplex overload in full mode");
  }
  const bool pt = cfg.mode == Mode::PtContinued;
  if (pt && !companion) {
    throw Error(Errc::MissingCompanion, "pt mode needs the mirror profile psi(-x)");
  }
  const Complex K = kappa * kappa;
  const double g = cfg.g;
  // State: psi, psi', and in pt mode the mirror v(x) = psi(-x) and v'.
  const int n = pt ? 2 : 1;
  VectorXc y(2 * n);
  y[0] = psi0;
  y[n] = dpsi0;
  if (pt) {
    y[1] = companion->psi;
    y[3] = companion->dpsi;
  }
  auto rhs = [&](double, const VectorXc& s) -> VectorXc {
    VectorXc ds(s.size());
    const Complex P = pt ? s[0] * s[1] : Complex(std::norm(s[0]), 0.0);
    for (int k = 0; k < n; ++k) {
      ds[k] = s[n + k];
      ds[n + k] = (K - g * P) * s[k];
    }
    return ds;
  };
  SegmentResult out;
  std::vector<double> stops;
  if (cfg.sample_step > 0.0) {
    const double dir = x1 > x0 ? 1.0 : -1.0;
    const long count = static_cast<long>(std::floor(std::abs(x1 - x0) / cfg.sample_step));
    for (long i = 0; i <= count; ++i) stops.push_back(x0 + dir * static_cast<double>(i) * cfg.sample_step);
    if (stops.back() != x1) stops.push_back(x1);
  }
  ode::Options opt;
  opt.rtol = opt.atol = cfg.ode_tol;
  opt.initial_step = 1e-3;
  y = ode::integrate(rhs, std::move(y), x0, x1, opt, stops, [&](double x, const VectorXc& s) {
    out.samples.push_back({x, s[0], s[n]});
  });
  out.psi = y[0];
  out.dpsi = y[n];
  if (pt) out.mirror = MirrorData{y[1], y[3]};
  return out;
}

BicomplexSegmentResult integrate_segment(const Bicomplex& kappa, const Bicomplex& psi0,
                                         const Bicomplex& dpsi0, double x0, double x1,
                                         const GpeConfig& cfg) {
  cfg.validate();
  const double half = 0.5 * cfg.a;
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);
  if ((lo < half && half < hi) || (lo < -half && -half < hi)) {
    throw Error(Errc::InvalidConfig, "segment crosses a delta well");
  }
  const Complex K1 = kappa.first() * kappa.first();
  const Complex K2 = kappa.second() * kappa.second();
  const double g = cfg.g;
  VectorXc y(4);
  y << psi0.first(), psi0.second(), dpsi0.first(), dpsi0.second();
  auto rhs = [&](double, const VectorXc& s) -> VectorXc {
    VectorXc ds(4);
    // psi_r^2 + psi_i^2 continued: the product of the idempotent components.
    const Complex P = s[0] * s[1];
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = (K1 - g * P) * s[0];
    ds[3] = (K2 - g * P) * s[1];
    return ds;
  };
  ode::Options opt;
  opt.rtol = opt.atol = cfg.ode_tol;
  opt.initial_step = 1e-3;
  y = ode::integrate(rhs, std::move(y), x0, x1, opt);
  return {Bicomplex::from_components(y[0], y[1]), Bicomplex::from_components(y[2], y[3])};
}

}  // namespace ptbec::gpe
