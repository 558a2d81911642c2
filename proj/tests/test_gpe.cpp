#include <doctest.h>

#include <cmath>
#include <functional>

#include "ptbec/gpe.hpp"

using namespace ptbec;
using namespace ptbec::gpe;

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double even_root(double a) {
  return bisect([&](double k) { return k * (1.0 + std::tanh(0.5 * a * k)) - 1.0; }, 1e-9, 1.0);
}

double odd_root(double a) {
  return bisect([&](double k) { return k * (1.0 + 1.0 / std::tanh(0.5 * a * k)) - 1.0; }, 1e-9, 1.0);
}

GpeConfig linear() {
  GpeConfig c;
  c.g = 0.0;
  return c;
}

template <typename Fn>
Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidConfig;
}

// Fixed-step RK4 for psi'' = (kappa^2 - g |psi|^2) psi.
std::pair<Complex, Complex> rk4(Complex kappa, double g, Complex psi, Complex dpsi, double x0, double x1,
                                int n) {
  const double h = (x1 - x0) / n;
  auto f = [&](Complex p, Complex dp) { return std::pair{dp, (kappa * kappa - g * std::norm(p)) * p}; };
  for (int i = 0; i < n; ++i) {
    const auto [a1, b1] = f(psi, dpsi);
    const auto [a2, b2] = f(psi + 0.5 * h * a1, dpsi + 0.5 * h * b1);
    const auto [a3, b3] = f(psi + 0.5 * h * a2, dpsi + 0.5 * h * b2);
    const auto [a4, b4] = f(psi + h * a3, dpsi + h * b3);
    psi += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    dpsi += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
  }
  return {psi, dpsi};
}

}  // namespace

TEST_CASE("config validation") {
  GpeConfig c;
  CHECK_NOTHROW(c.validate());
  c.a = 0.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::InvalidConfig);
  c = GpeConfig{};
  c.g = -1.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::InvalidConfig);
  c = GpeConfig{};
  c.x_max = 1.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::InvalidConfig);
  c = GpeConfig{};
  c.gamma = Complex(0.3, 0.01);
  CHECK(code_of([&] { c.validate(); }) == Errc::InvalidConfig);
  c.mode = Mode::FullContinuation;
  CHECK_NOTHROW(c.validate());
  CHECK(mode_from_string("FULL_CONTINUATION") == Mode::FullContinuation);
  CHECK(code_of([&] { mode_from_string("bogus"); }) == Errc::InvalidConfig);
}

TEST_CASE("delta jump") {
  CHECK(delta_jump(Complex(0.0), Complex(0.7, -0.2), Complex(1.0, 0.4)) == Complex(0.7, -0.2));
  CHECK(delta_jump(Complex(1.0), Complex(0.0), Complex(1.0)) == Complex(-1.0));
  const Complex d = delta_jump(Complex(1.0), Complex(0.5), Complex(1.0, 0.3));
  CHECK(d.real() == doctest::Approx(-0.5));
  CHECK(d.imag() == doctest::Approx(-0.3));
  const Bicomplex psi = Bicomplex::from_components(Complex(0.2, 0.1), Complex(1.0, -0.3));
  const Bicomplex dl = Bicomplex::from_components(Complex(-0.4), Complex(0.6, 0.2));
  const Bicomplex s = Bicomplex::from_components(Complex(1.0, -0.2), Complex(1.0, 0.2));
  const Bicomplex out = delta_jump(psi, dl, s);
  CHECK(std::abs(out.first() - delta_jump(psi.first(), dl.first(), s.first())) < 1e-15);
  CHECK(std::abs(out.second() - delta_jump(psi.second(), dl.second(), s.second())) < 1e-15);
}

TEST_CASE("well strengths carry gamma and the asymmetry") {
  GpeConfig c;
  c.gamma = 0.2;
  c.asym = 0.05;
  const WellStrengths w = well_strengths(c, 2);
  CHECK(std::abs(w.left - Complex(1.05, 0.2)) < 1e-15);
  CHECK(std::abs(w.right - Complex(0.95, -0.2)) < 1e-15);
}

TEST_CASE("integrate_segment against exact linear solutions") {
  GpeConfig c = linear();
  c.a = 1.0;
  const SegmentResult r = integrate_segment(1.0, 1.0, -1.0, 1.0, 2.0, c);
  CHECK(std::abs(r.psi - std::exp(-1.0)) < 1e-12);
  CHECK(std::abs(r.dpsi + std::exp(-1.0)) < 1e-12);

  const Complex k(0.5, 0.1);
  const SegmentResult z = integrate_segment(k, 1.0, -k, 1.5, 3.0, c);
  CHECK(std::abs(z.psi - std::exp(-k * 1.5)) < 10 * c.ode_tol);
  CHECK(std::abs(z.dpsi + k * std::exp(-k * 1.5)) < 10 * c.ode_tol);
}

TEST_CASE("integrate_segment against Richardson-extrapolated RK4") {
  GpeConfig c;
  c.g = 1.0;
  const double k = 0.75;
  const Complex psi0 = 0.3, dpsi0 = -0.3 * k;
  const SegmentResult r = integrate_segment(k, psi0, dpsi0, 6.0, 1.1, c);
  const auto coarse = rk4(k, 1.0, psi0, dpsi0, 6.0, 1.1, 2000);
  const auto fine = rk4(k, 1.0, psi0, dpsi0, 6.0, 1.1, 4000);
  const Complex psi = (16.0 * fine.first - coarse.first) / 15.0;
  const Complex dpsi = (16.0 * fine.second - coarse.second) / 15.0;
  CHECK(std::abs(r.psi - psi) < 100 * c.ode_tol);
  CHECK(std::abs(r.dpsi - dpsi) < 100 * c.ode_tol);
}

TEST_CASE("integrate_segment preconditions") {
  GpeConfig c;
  CHECK(code_of([&] { integrate_segment(1.0, 1.0, -1.0, 2.0, 0.5, c); }) == Errc::InvalidConfig);
  c.mode = Mode::PtContinued;
  CHECK(code_of([&] { integrate_segment(1.0, 1.0, -1.0, 3.0, 2.0, c); }) == Errc::MissingCompanion);
  const SegmentResult r = integrate_segment(1.0, 1.0, -1.0, 3.0, 2.0, c, MirrorData{1.0, -1.0});
  REQUIRE(r.mirror.has_value());
}

TEST_CASE("residual at the linear oracle and for non-decaying unknowns") {
  GpeConfig c = linear();
  for (double k : {even_root(2.2), odd_root(2.2)}) {
    CHECK(residual(linear_state_unknowns(c, k), c).components.norm() < 1e-8);
  }
  VectorXr z = linear_state_unknowns(c, even_root(2.2));
  CHECK(residual(z, c).components.size() == 5);
  z[0] = -0.1;
  CHECK(code_of([&] { residual(z, c); }) == Errc::NonDecaying);
  GpeConfig f = c;
  f.mode = Mode::FullContinuation;
  const VectorXr zf = convert_unknowns(linear_state_unknowns(c, even_root(2.2)), Mode::Naive, Mode::FullContinuation);
  CHECK(residual(zf, f).components.size() == 10);
  CHECK(unknown_count(Mode::PtContinued) == 6);
}

TEST_CASE("linear spectrum oracle") {
  const std::vector<Complex> roots = linear_spectrum_oracle(2.2, 0.0);
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] - even_root(2.2)) < 1e-12);
  CHECK(std::abs(roots[1] - odd_root(2.2)) < 1e-12);
  const std::vector<Complex> broken = linear_spectrum_oracle(2.2, 0.41);
  REQUIRE(broken.size() == 2);
  CHECK(std::abs(broken[0] - std::conj(broken[1])) < 1e-12);
  CHECK(std::abs(broken[0].imag()) > 1e-3);
}

TEST_CASE("solve_bound_state in the linear limit") {
  GpeConfig c = linear();
  const BoundState even = solve_bound_state(c, linear_state_unknowns(c, 0.6));
  CHECK(std::abs(even.kappa - even_root(2.2)) < 1e-8);
  CHECK(even.pt_class == PtClass::Symmetric);
  CHECK(even.residual_norm <= c.newton_tol);
  CHECK(std::abs(even.norm - 1.0) < 1e-8);
  const BoundState odd = solve_bound_state(c, linear_state_unknowns(c, 0.1));
  CHECK(std::abs(odd.kappa - odd_root(2.2)) < 1e-8);
  CHECK(code_of([&] { solve_bound_state(c, VectorXr::Zero(4)); }) == Errc::InvalidConfig);
}

TEST_CASE("nonlinear states at g = 1") {
  GpeConfig c;
  c.g = 1.0;
  c.gamma = 0.2;
  const std::vector<BoundState> pair = symmetric_pair(c);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].kappa.real() > pair[1].kappa.real());
  for (const BoundState& s : pair) {
    CHECK(residual(s.unknowns, c).components.norm() <= c.newton_tol);
    CHECK(s.pt_class == PtClass::Symmetric);
    CHECK(s.symmetry_defect < 1e-6);
    CHECK(std::abs(s.norm - 1.0) < 1e-8);
    CHECK(std::abs(s.kappa.imag()) < 1e-8);
  }

  SUBCASE("mode agreement") {
    GpeConfig pt = c;
    pt.mode = Mode::PtContinued;
    GpeConfig full = c;
    full.mode = Mode::FullContinuation;
    for (const BoundState& s : pair) {
      const BoundState p = solve_bound_state(pt, convert_unknowns(s.unknowns, Mode::Naive, Mode::PtContinued));
      const BoundState f = solve_bound_state(full, convert_unknowns(s.unknowns, Mode::Naive, Mode::FullContinuation));
      CHECK(std::abs(p.kappa - s.kappa) < 1e-8);
      CHECK(std::abs(f.kappa - s.kappa) < 1e-8);
      CHECK(std::abs(recombine(f.kappa_components) - s.kappa) < 1e-8);
      CHECK(f.pt_class == PtClass::Symmetric);
      const BoundState fp = solve_bound_state(full, convert_unknowns(p.unknowns, Mode::PtContinued, Mode::FullContinuation));
      CHECK(std::abs(fp.kappa - s.kappa) < 1e-8);
    }
  }

  SUBCASE("jacobian against central differences") {
    for (Mode m : {Mode::Naive, Mode::PtContinued, Mode::FullContinuation}) {
      GpeConfig mc = c;
      mc.mode = m;
      if (m == Mode::FullContinuation) mc.gamma = Complex(0.2, 0.02);
      VectorXr z = convert_unknowns(pair[0].unknowns, Mode::Naive, m);
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] += 1e-3 * (1 + i % 3);
      const Linearization lin = linearize(z, mc, pair[0].x_max);
      MatrixXr fd(lin.jacobian.rows(), lin.jacobian.cols());
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        VectorXr zp = z, zm = z;
        zp[j] += 1e-6;
        zm[j] -= 1e-6;
        fd.col(j) = (linearize(zp, mc, pair[0].x_max).residual - linearize(zm, mc, pair[0].x_max).residual) / 2e-6;
      }
      INFO("mode " << to_string(m));
      CHECK((lin.jacobian - fd).cwiseAbs().maxCoeff() < 1e-4 * lin.jacobian.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("full continuation of the ground state at gamma = 0 agrees with naive") {
  GpeConfig c;
  c.g = 1.0;
  const BoundState ground = symmetric_pair(c)[0];
  GpeConfig full = c;
  full.mode = Mode::FullContinuation;
  const BoundState f = solve_bound_state(full, convert_unknowns(ground.unknowns, Mode::Naive, Mode::FullContinuation));
  CHECK(std::abs(recombine(f.kappa_components) - ground.kappa) < 1e-8);
  CHECK(f.kappa_components.ii == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("broken pair above gamma_cr is a conjugate pair") {
  GpeConfig c;
  c.g = 1.0;
  c.gamma = 0.31;
  const std::vector<BoundState> pair = broken_pair(c);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].kappa.imag() > 1e-3);
  CHECK(std::abs(pair[0].kappa - std::conj(pair[1].kappa)) < 1e-8);
  for (const BoundState& s : pair) {
    CHECK(s.pt_class == PtClass::Broken);
    CHECK(std::abs(s.norm - 1.0) < 1e-8);
  }
}

TEST_CASE("continuation") {
  GpeConfig c;
  c.g = 1.0;
  const BoundState seed = symmetric_pair(c)[0];

  SUBCASE("zero-length sweep returns the seed") {
    Sweep s;
    s.start = s.stop = 0.0;
    s.points = 5;
    const std::vector<BoundState> out = continue_branch(c, s, seed);
    REQUIRE(out.size() == 1);
    CHECK(out[0].unknowns == seed.unknowns);
  }

  SUBCASE("sweep stays connected and ends past the triple point") {
    Sweep s;
    s.start = 0.0;
    s.stop = 0.35;
    s.points = 8;
    const std::vector<BoundState> out = continue_branch(c, s, seed);
    REQUIRE(out.size() == 8);
    for (std::size_t i = 1; i < out.size(); ++i) {
      CHECK(std::abs(out[i].kappa - out[i - 1].kappa) < s.continuity);
      CHECK(std::abs(out[i].kappa.imag()) < 1e-8);
    }
  }

  SUBCASE("the real pair is lost beyond the branch point") {
    Sweep s;
    s.start = 0.0;
    s.stop = 0.45;
    s.points = 10;
    CHECK(code_of([&] {
            const BoundState excited = symmetric_pair(c)[1];
            continue_branch(c, s, excited);
          }) == Errc::BranchLost);
  }
}

TEST_CASE("critical points") {
  SUBCASE("g = 1: gamma_cr below gamma_bp") {
    GpeConfig c;
    c.g = 1.0;
    const CriticalPoints cp = find_critical_points(c);
    CHECK(cp.gamma_cr == doctest::Approx(0.308).epsilon(0.005 / 0.308));
    CHECK(cp.gamma_cr < cp.gamma_bp);
  }
  SUBCASE("g = 0: both coincide with the linear branch point") {
    const CriticalPoints cp = find_critical_points(linear());
    CHECK(std::abs(cp.gamma_cr - cp.gamma_bp) < 1e-3);
    CHECK(std::abs(linear_spectrum_oracle(2.2, cp.gamma_bp - 0.005)[0].imag()) < 1e-12);
    CHECK(std::abs(linear_spectrum_oracle(2.2, cp.gamma_bp + 0.005)[0].imag()) > 1e-3);
  }
}

TEST_CASE("g -> 0 convergence at gamma = 0.15") {
  const double gamma = 0.15;
  const std::vector<Complex> lin = linear_spectrum_oracle(2.2, gamma);
  REQUIRE(lin.size() == 2);
  double last[2] = {INFINITY, INFINITY};
  for (double g : {0.05, 0.02, 0.01}) {
    GpeConfig c;
    c.g = g;
    c.gamma = gamma;
    const std::vector<BoundState> pair = symmetric_pair(c);
    for (int k = 0; k < 2; ++k) {
      const double d = std::abs(pair[k].kappa - lin[k]);
      CHECK(d < last[k]);
      last[k] = d;
    }
  }
  CHECK(last[0] < 0.01);
  CHECK(last[1] < 0.01);
}
