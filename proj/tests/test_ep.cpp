#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "ptbec/ep_analysis.hpp"

using namespace ptbec;
using namespace ptbec::ep;

namespace {

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

ContourSpec model_circle(Complex center, double radius) {
  ContourSpec s;
  s.parameter = ContourParameter::ModelGamma;
  s.center = center;
  s.radius = radius;
  return s;
}

PermutationResult run(SpectrumProvider& p, const ContourSpec& s) {
  const BranchTrace t = trace_contour(p, s);
  REQUIRE(t.matched);
  return classify(t);
}

std::vector<int> inverse(const std::vector<int>& m) {
  std::vector<int> inv(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) inv[m[i]] = static_cast<int>(i);
  return inv;
}

}  // namespace

TEST_CASE("contour definition") {
  ContourSpec s = model_circle(0.5, 0.05);
  CHECK_NOTHROW(s.validate());
  CHECK(std::abs(s.point(0.0) - Complex(0.55)) < 1e-15);
  CHECK(std::abs(s.point(0.25) - Complex(0.5, 0.05)) < 1e-15);
  s.orientation = Orientation::Clockwise;
  CHECK(std::abs(s.point(0.25) - Complex(0.5, -0.05)) < 1e-15);
  s.radius = 0.0;
  CHECK(code_of([&] { s.validate(); }) == Errc::InvalidConfig);
  s = model_circle(0.5, 0.05);
  s.n_steps = 8;
  CHECK(code_of([&] { s.validate(); }) == Errc::InvalidConfig);
  CHECK(contour_parameter_from_string("ASYMMETRY_A") == ContourParameter::AsymmetryA);
  CHECK(code_of([] { contour_parameter_from_string("nope"); }) == Errc::InvalidConfig);
}

TEST_CASE("permutation classification") {
  CHECK(permutation_from_mapping({0, 1, 2}).classification == Classification::Identity);
  const PermutationResult p2 = permutation_from_mapping({0, 2, 1});
  CHECK(p2.classification == Classification::Ep2Pair);
  CHECK(p2.cycle_structure == std::vector<int>{2, 1});
  const PermutationResult p3 = permutation_from_mapping({1, 2, 0});
  CHECK(p3.classification == Classification::Ep3Cycle);
  CHECK(p3.cycle_structure == std::vector<int>{3});
  CHECK(permutation_from_mapping({1, 0, 3, 2}).classification == Classification::Other);
  CHECK(std::string(to_string(Classification::Ep3Cycle)) == "EP3_CYCLE");
}

TEST_CASE("matrix model monodromy") {
  MatrixModelProvider provider(1.2);

  SUBCASE("no exceptional point inside") {
    CHECK(run(provider, model_circle(0.5, 0.05)).classification == Classification::Identity);
  }

  SUBCASE("E3 and E4 swap around gamma_cr") {
    for (double radius : {0.04, 0.02}) {
      const PermutationResult r = run(provider, model_circle(0.8, radius));
      CHECK(r.classification == Classification::Ep2Pair);
      CHECK(r.mapping == std::vector<int>{0, 2, 1});
    }
  }

  SUBCASE("eigenvectors follow the eigenvalues") {
    const ContourSpec s = model_circle(0.8, 0.04);
    const BranchTrace t = trace_contour(provider, s);
    CHECK(eigenvector_permutation(provider, t).mapping == classify(t).mapping);
  }

  SUBCASE("two turns and reversed orientation") {
    ContourSpec s = model_circle(0.8, 0.04);
    s.turns = 2;
    CHECK(run(provider, s).classification == Classification::Identity);
    s.turns = 1;
    const PermutationResult forward = run(provider, s);
    s.orientation = Orientation::Clockwise;
    CHECK(run(provider, s).mapping == inverse(forward.mapping));
  }
}

TEST_CASE("appendix matrix") {
  for (Complex y : {Complex(0.0), Complex(0.3), Complex(0.7, 0.2), Complex(2.0)}) {
    const Complex r = std::sqrt(1.0 - y);
    std::vector<Complex> expected{1.0, 1.0 + r, 1.0 - r};
    Eigen::ComplexEigenSolver<Matrix3c> es(appendix_matrix(y, 0.0));
    for (Complex e : expected) {
      double best = 1e300, best_exact = 1e300;
      for (int k = 0; k < 3; ++k) best = std::min(best, std::abs(es.eigenvalues()[k] - e));
      for (Complex v : appendix_eigenvalues(y, 0.0)) best_exact = std::min(best_exact, std::abs(v - e));
      CHECK(best < 1e-10);
      CHECK(best_exact < 1e-12);
    }
  }

  SUBCASE("y = 1 is a single Jordan block") {
    const Matrix3c n = appendix_matrix(1.0, 0.0) - Matrix3c::Identity();
    CHECK((n * n * n).norm() < 1e-14);
    CHECK((n * n).norm() > 0.1);
    CHECK(model::numerical_rank(n) == 2);
  }

  SUBCASE("exact eigenvalues agree with a dense solver at nonzero eps") {
    const Complex y(0.4, 0.1), eps(0.03, -0.02);
    Eigen::ComplexEigenSolver<Matrix3c> es(appendix_matrix(y, eps));
    for (Complex v : appendix_eigenvalues(y, eps)) {
      double best = 1e300;
      for (int k = 0; k < 3; ++k) best = std::min(best, std::abs(es.eigenvalues()[k] - v));
      CHECK(best < 1e-10);
    }
  }
}

TEST_CASE("appendix expansions") {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(1e-9 * std::pow(10.0, k / 4.0));

  SUBCASE("cube root at y = 1") {
    const ExpansionFit f = appendix_expansion_check(grid);
    CHECK(f.slope == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    const double third = 2.0 * std::numbers::pi / 3.0;
    const double args[3] = {third, 0.0, -third};
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(std::abs(f.prefactors[k]) - std::cbrt(2.0)) < 1e-2);
      CHECK(std::abs(std::remainder(std::arg(f.prefactors[k]) - args[k], 2 * std::numbers::pi)) < 1e-2);
    }
  }

  SUBCASE("linear away from y = 1") {
    const ExpansionFit f = appendix_expansion_check(grid, 0.5);
    CHECK(f.slopes[1] == doctest::Approx(1.0).epsilon(0.01));
    const std::vector<Complex> c = appendix_linear_response(0.5);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(-f.prefactors[k] - c[k]) < 1e-4 * std::abs(c[0]));
  }

  SUBCASE("invalid grids") {
    CHECK(code_of([] { appendix_expansion_check({1e-9, 1e-8}); }) == Errc::InvalidConfig);
    CHECK(code_of([] { appendix_expansion_check({1e-7, 1e-6, 1e-5}); }) == Errc::InvalidConfig);
    CHECK(code_of([] { appendix_expansion_check({1e-9, 1e-7, 1e-4}); }) == Errc::InvalidConfig);
  }
}

TEST_CASE("appendix linear response") {
  const std::vector<Complex> c0 = appendix_linear_response(0.0);
  CHECK(std::abs(c0[0] - 2.0) < 1e-15);
  CHECK(std::abs(c0[1] - 0.0) < 1e-15);
  CHECK(std::abs(c0[2] + 1.0) < 1e-15);
  CHECK(std::abs(appendix_linear_response(0.75)[0] - 8.0) < 1e-14);

  for (double y : {0.0, 0.5, 0.75}) {
    const std::vector<Complex> c = appendix_linear_response(y);
    const double r = std::sqrt(1.0 - y);
    const Complex base[3] = {1.0, 1.0 + r, 1.0 - r};
    const double h = 1e-8;
    const std::vector<Complex> plus = appendix_eigenvalues(y, h);
    const std::vector<Complex> minus = appendix_eigenvalues(y, -h);
    Complex sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      auto nearest = [&](const std::vector<Complex>& v) {
        Complex best = v[0];
        for (Complex z : v) {
          if (std::abs(z - base[k]) < std::abs(best - base[k])) best = z;
        }
        return best;
      };
      const Complex fd = (nearest(plus) - nearest(minus)) / (2.0 * h);
      INFO("y = " << y << " branch " << k);
      CHECK(std::abs(fd - c[k]) < 1e-5 * std::max(1.0, std::abs(c[k])));
      sum += c[k];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  CHECK(std::abs(appendix_linear_response(1.0 - 1e-3)[0]) > 1e3);
  CHECK(code_of([] { appendix_linear_response(1.0); }) == Errc::InvalidConfig);
}

TEST_CASE("appendix monodromy") {
  ContourSpec s;
  s.parameter = ContourParameter::AppendixEps;
  s.center = 0.0;
  s.radius = 1e-3;
  AppendixProvider provider(ContourParameter::AppendixEps, 1.0);
  const PermutationResult once = run(provider, s);
  CHECK(once.classification == Classification::Ep3Cycle);
  s.turns = 3;
  CHECK(run(provider, s).classification == Classification::Identity);
  s.turns = 1;
  s.orientation = Orientation::Clockwise;
  CHECK(run(provider, s).mapping == inverse(once.mapping));

  AppendixProvider wrong(ContourParameter::ModelGamma, 1.0);
  CHECK(code_of([&] { wrong.evaluate(0.1); }) == Errc::InvalidConfig);
}

TEST_CASE("function provider") {
  SUBCASE("a plain crossing is not exceptional") {
    FunctionProvider p({"a", "b", "c"}, [](Complex z) { return std::vector<Complex>{z, -z, 1.0}; });
    ContourSpec s = model_circle(0.0, 0.1);
    CHECK(run(p, s).classification == Classification::Identity);
  }
  SUBCASE("square root branch point") {
    FunctionProvider p({"a", "b"}, [](Complex z) {
      const Complex r = std::sqrt(z);
      return std::vector<Complex>{r, -r};
    });
    const PermutationResult r = run(p, model_circle(0.0, 0.1));
    CHECK(r.mapping == std::vector<int>{1, 0});
  }
  SUBCASE("cardinality change") {
    FunctionProvider p({"a", "b"}, [](Complex z) {
      if (z.imag() < -0.05) return std::vector<Complex>{z};
      return std::vector<Complex>{z, -z};
    });
    CHECK(code_of([&] { trace_contour(p, model_circle(0.0, 0.1)); }) == Errc::CardinalityChange);
  }
  SUBCASE("ambiguous matching through a crossing") {
    FunctionProvider p({"a", "b"}, [](Complex z) { return std::vector<Complex>{z, -z}; });
    CHECK(code_of([&] { trace_contour(p, model_circle(0.05, 0.05)); }) == Errc::AmbiguousMatching);
  }
}
