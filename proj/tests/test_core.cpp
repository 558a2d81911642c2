#include <doctest.h>

#include <cmath>

#include "ptbec/bicomplex.hpp"
#include "ptbec/ode.hpp"

using namespace ptbec;

TEST_CASE("recombination of bicomplex values") {
  CHECK(recombine({1.0, 0.0, 0.0, 0.0}) == Complex(1.0, 0.0));
  const Complex k = recombine({0.3, 0.1, 0.2, 0.05});
  CHECK(k.real() == doctest::Approx(0.25));
  CHECK(k.imag() == doctest::Approx(0.3));
}

TEST_CASE("idempotent components round trip") {
  const Bicomplex x{0.3, -1.2, 0.7, 2.5};
  const Bicomplex y = Bicomplex::from_components(x.first(), x.second());
  CHECK(std::abs(y.rr - x.rr) < 1e-15);
  CHECK(std::abs(y.ri - x.ri) < 1e-15);
  CHECK(std::abs(y.ir - x.ir) < 1e-15);
  CHECK(std::abs(y.ii - x.ii) < 1e-15);
  CHECK(x.second() == recombine(x));
}

TEST_CASE("ordinary numbers embed with conjugate components") {
  const Complex z(0.4, -0.9);
  const Bicomplex b = Bicomplex::from_ordinary(z);
  CHECK(b.second() == z);
  CHECK(b.first() == std::conj(z));
  CHECK(b.ri == 0.0);
  CHECK(b.ii == 0.0);
}

TEST_CASE("error codes carry their names") {
  const Error e(Errc::BranchLost, "detail");
  CHECK(e.code() == Errc::BranchLost);
  CHECK(std::string(e.what()) == "BranchLost: detail");
  CHECK(std::string(to_string(Errc::InvalidConfig)) == "InvalidConfig");
}

TEST_CASE("integrator reproduces a decaying exponential") {
  auto rhs = [](double, const VectorXc& y) -> VectorXc { return -y; };
  VectorXc y0(1);
  y0[0] = 1.0;
  ode::Options opt;
  const VectorXc y = ode::integrate(rhs, y0, 0.0, 3.0, opt);
  CHECK(std::abs(y[0] - std::exp(-3.0)) < 1e-11);
}

TEST_CASE("integrator handles complex oscillation backwards and lands on stops") {
  const Complex k(0.5, 2.0);
  auto rhs = [&](double, const VectorXc& y) -> VectorXc { return k * y; };
  VectorXc y0(1);
  y0[0] = 1.0;
  ode::Options opt;
  const std::vector<double> stops{-0.5, -1.0, -1.5};
  std::vector<double> seen;
  const VectorXc y = ode::integrate(rhs, y0, 0.0, -2.0, opt, stops,
                                    [&](double x, const VectorXc& s) {
                                      seen.push_back(x);
                                      CHECK(std::abs(s[0] - std::exp(k * x)) < 1e-10);
                                    });
  CHECK(seen == stops);
  CHECK(std::abs(y[0] - std::exp(-2.0 * k)) < 1e-10);
}

TEST_CASE("integrator reports step underflow") {
  auto rhs = [](double x, const VectorXc& y) -> VectorXc { return y / (1.0 - x); };
  VectorXc y0(1);
  y0[0] = 1.0;
  ode::Options opt;
  opt.min_step = 1e-6;
  try {
    ode::integrate(rhs, y0, 0.0, 2.0, opt);
    FAIL("expected StepUnderflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StepUnderflow);
  }
}
