#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ptbec/ep_analysis.hpp"

namespace ptbec::ep {

const char* to_string(ContourParameter p) noexcept {
  switch (p) {
    case ContourParameter::Gamma: return "GAMMA";
    case ContourParameter::AsymmetryA: return "ASYMMETRY_A";
    case ContourParameter::ModelGamma: return "MODEL_GAMMA";
    case ContourParameter::AppendixY: return "APPENDIX_Y";
    case ContourParameter::AppendixEps: return "APPENDIX_EPS";
  }
  return "UNKNOWN";
}

ContourParameter contour_parameter_from_string(const std::string& name) {
  for (ContourParameter p : {ContourParameter::Gamma, ContourParameter::AsymmetryA,
                             ContourParameter::ModelGamma, ContourParameter::AppendixY,
                             ContourParameter::AppendixEps}) {
    if (name == to_string(p)) return p;
  }
  throw Error(Errc::InvalidConfig, "unknown contour parameter '" + name + "'");
}

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Identity: return "IDENTITY";
    case Classification::Ep2Pair: return "EP2_PAIR";
    case Classification::Ep3Cycle: return "EP3_CYCLE";
    case Classification::Other: return "OTHER";
  }
  return "OTHER";
}

void ContourSpec::validate() const {
  if (!(radius > 0.0)) throw Error(Errc::InvalidConfig, "contour radius must be > 0");
  if (n_steps < 16) throw Error(Errc::InvalidConfig, "contour needs at least 16 steps");
  if (turns < 1) throw Error(Errc::InvalidConfig, "contour needs at least one turn");
}

Complex ContourSpec::point(double s) const {
  const double sign = orientation == Orientation::CounterClockwise ? 1.0 : -1.0;
  const double phi = 2.0 * std::numbers::pi * s;
  return center + radius * Complex(std::cos(phi), sign * std::sin(phi));
}

// ---------------------------------------------------------------------------

std::vector<std::string> MatrixModelProvider::labels() const { return {"E2", "E3", "E4"}; }

std::vector<Complex> MatrixModelProvider::evaluate(Complex gamma) {
  const model::ModelSpectrum e = model::eigenvalues({g_, gamma});
  return {e.e2, e.e3, e.e4};
}

std::vector<Vector3c> MatrixModelProvider::vectors(Complex gamma) const {
  const Matrix3c s = model::eigenvectors({g_, gamma});
  return {s.col(0), s.col(1), s.col(2)};
}

std::vector<std::string> AppendixProvider::labels() const { return {"E1", "E2", "E3"}; }

std::vector<Complex> AppendixProvider::evaluate(Complex parameter) {
  if (which_ == ContourParameter::AppendixY) return appendix_eigenvalues(parameter, fixed_);
  if (which_ == ContourParameter::AppendixEps) return appendix_eigenvalues(fixed_, parameter);
  throw Error(Errc::InvalidConfig, "appendix provider takes APPENDIX_Y or APPENDIX_EPS");
}

// ---------------------------------------------------------------------------

namespace {

struct Assignment {
  std::vector<int> perm;
  double best = 0.0;
  double second = std::numeric_limits<double>::infinity();
  double max_move = 0.0;
};

Assignment assign(const std::vector<Complex>& current, const std::vector<Complex>& next) {
  const int m = static_cast<int>(current.size());
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Assignment out;
  out.best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < m; ++i) cost += std::abs(next[perm[i]] - current[i]);
    if (cost < out.best) {
      out.second = out.best;
      out.best = cost;
      out.perm = perm;
    } else if (cost < out.second) {
      out.second = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int i = 0; i < m; ++i) {
    out.max_move = std::max(out.max_move, std::abs(next[out.perm[i]] - current[i]));
  }
  return out;
}

double min_gap(const std::vector<Complex>& v) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) gap = std::min(gap, std::abs(v[i] - v[j]));
  }
  return gap;
}

}  // namespace

BranchTrace trace_contour(SpectrumProvider& provider, const ContourSpec& spec, int max_depth) {
  spec.validate();
  BranchTrace trace;
  trace.labels = provider.labels();
  const std::size_t m = trace.labels.size();
  auto fetch = [&](double s) {
    std::vector<Complex> v = provider.evaluate(spec.point(s));
    if (v.size() != m) {
      throw Error(Errc::CardinalityChange, "provider returned " + std::to_string(v.size()) +
                                               " values, expected " + std::to_string(m));
    }
    return v;
  };

  std::vector<Complex> current = fetch(0.0);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<Complex>> rows{current};
  trace.order.push_back(order);
  trace.parameters.push_back(spec.point(0.0));

  std::function<void(double, double, int)> advance = [&](double sa, double sb, int depth) {
    const std::vector<Complex> next = fetch(sb);
    const Assignment a = assign(current, next);
    const bool ambiguous = m > 1 && (!(a.best <= 0.5 * a.second) || !(a.max_move < 0.5 * min_gap(current)));
    if (ambiguous) {
      if (depth >= max_depth) {
        throw Error(Errc::AmbiguousMatching,
                    "branch assignment stays ambiguous near s = " + std::to_string(sb));
      }
      ++trace.refinements;
      const double mid = 0.5 * (sa + sb);
      advance(sa, mid, depth + 1);
      advance(mid, sb, depth + 1);
      return;
    }
    for (std::size_t i = 0; i < m; ++i) current[i] = next[a.perm[i]];
    order = a.perm;
  };

  const int total = spec.n_steps * spec.turns;
  for (int k = 1; k <= total; ++k) {
    const double sa = static_cast<double>(k - 1) / spec.n_steps;
    const double sb = static_cast<double>(k) / spec.n_steps;
    advance(sa, sb, 0);
    rows.push_back(current);
    trace.order.push_back(order);
    trace.parameters.push_back(spec.point(sb));
  }

  trace.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < m; ++i) trace.values(r, i) = rows[r][i];
  }
  trace.matched = true;
  return trace;
}

PermutationResult permutation_from_mapping(std::vector<int> mapping) {
  PermutationResult out;
  const int m = static_cast<int>(mapping.size());
  std::vector<bool> seen(m, false);
  bool bijective = true;
  for (int j : mapping) {
    if (j < 0 || j >= m || seen[j]) {
      bijective = false;
      break;
    }
    seen[j] = true;
  }
  out.mapping = std::move(mapping);
  if (!bijective) return out;
  std::fill(seen.begin(), seen.end(), false);
  for (int i = 0; i < m; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = out.mapping[j]) {
      seen[j] = true;
      ++len;
    }
    out.cycle_structure.push_back(len);
  }
  std::sort(out.cycle_structure.rbegin(), out.cycle_structure.rend());
  const auto& c = out.cycle_structure;
  if (std::all_of(c.begin(), c.end(), [](int l) { return l == 1; })) {
    out.classification = Classification::Identity;
  } else if (c.size() >= 1 && c[0] == 2 && std::count(c.begin(), c.end(), 2) == 1) {
    out.classification = Classification::Ep2Pair;
  } else if (c.size() >= 1 && c[0] == 3 && std::count(c.begin(), c.end(), 3) == 1 &&
             std::count(c.begin(), c.end(), 1) == static_cast<long>(c.size()) - 1) {
    out.classification = Classification::Ep3Cycle;
  }
  return out;
}

PermutationResult classify(const BranchTrace& trace) {
  if (!trace.matched || trace.values.rows() < 2) {
    throw Error(Errc::InvalidConfig, "classification needs a matched trace");
  }
  const Eigen::Index m = trace.values.cols();
  const Eigen::Index last = trace.values.rows() - 1;
  std::vector<Complex> start(m), end(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    start[i] = trace.values(0, i);
    end[i] = trace.values(last, i);
  }
  const double tol = 0.5 * min_gap(end);
  std::vector<int> mapping(m, -1);
  for (Eigen::Index i = 0; i < m; ++i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = std::abs(end[i] - start[j]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    mapping[i] = m == 1 || bd < tol ? best : -1;
  }
  return permutation_from_mapping(std::move(mapping));
}

PermutationResult eigenvector_permutation(const MatrixModelProvider& provider,
                                          const BranchTrace& trace) {
  const std::size_t rows = trace.parameters.size();
  if (rows < 2) throw Error(Errc::InvalidConfig, "trace too short");
  std::vector<Vector3c> start = provider.vectors(trace.parameters[0]);
  std::vector<Vector3c> tracked = start;
  const int m = static_cast<int>(start.size());
  for (std::size_t r = 1; r < rows; ++r) {
    const std::vector<Vector3c> next = provider.vectors(trace.parameters[r]);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_perm = perm;
    double best = -1.0;
    do {
      double score = 0.0;
      for (int i = 0; i < m; ++i) score += std::abs(tracked[i].dot(next[perm[i]]));
      if (score > best) {
        best = score;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int i = 0; i < m; ++i) {
      Vector3c v = next[best_perm[i]];
      const Complex overlap = tracked[i].dot(v);
      if (std::abs(overlap) > 0.0) v *= std::conj(overlap) / std::abs(overlap);
      tracked[i] = v;
    }
  }
  std::vector<int> mapping(m, -1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (std::abs(std::abs(tracked[i].dot(start[j])) - 1.0) < 1e-6) mapping[i] = j;
    }
  }
  return permutation_from_mapping(std::move(mapping));
}

}  // namespace ptbec::ep
