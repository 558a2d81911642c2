#include <numbers>

#include "ptbec/ep_analysis.hpp"

namespace ptbec::ep {

using gpe::BoundState;
using gpe::GpeConfig;
using gpe::Mode;

GpeProvider::GpeProvider(GpeConfig base, ContourParameter which, Complex start,
                         std::vector<BoundState> states, std::vector<std::string> labels)
    : base_(std::move(base)),
      which_(which),
      current_(start),
      states_(std::move(states)),
      labels_(std::move(labels)) {
  if (which_ != ContourParameter::Gamma && which_ != ContourParameter::AsymmetryA) {
    throw Error(Errc::InvalidConfig, "gpe provider takes GAMMA or ASYMMETRY_A");
  }
  if (labels_.size() != states_.size()) {
    throw Error(Errc::InvalidConfig, "one label per state required");
  }
  base_.mode = Mode::FullContinuation;
}

GpeConfig GpeProvider::config_at(Complex parameter) const {
  GpeConfig c = base_;
  if (which_ == ContourParameter::Gamma) {
    c.gamma = parameter;
  } else {
    c.asym = parameter;
  }
  return c;
}

std::vector<Complex> GpeProvider::evaluate(Complex parameter) {
  const Complex from = current_;
  if (parameter != from) {
    gpe::ConfigPath path = [&](double t) { return config_at(from + t * (parameter - from)); };
    for (BoundState& s : states_) s = gpe::transport(path, s, 0.05, 1.0);
    current_ = parameter;
  }
  std::vector<Complex> out;
  for (const BoundState& s : states_) out.push_back(s.kappa);
  return out;
}

std::vector<BoundState> triple_point_states(const GpeConfig& cfg) {
  if (cfg.gamma.imag() != 0.0 || cfg.asym != 0.0) {
    throw Error(Errc::InvalidConfig, "triple-point states need real gamma and A = 0");
  }
  GpeConfig naive = cfg;
  naive.mode = Mode::Naive;
  const std::vector<BoundState> sym = gpe::symmetric_pair(naive);
  const std::vector<BoundState> brk = gpe::broken_pair(naive);
  GpeConfig full = cfg;
  full.mode = Mode::FullContinuation;
  std::vector<BoundState> out;
  for (const BoundState* s : {&sym[0], &brk[0], &brk[1]}) {
    out.push_back(gpe::solve_bound_state(
        full, gpe::convert_unknowns(s->unknowns, Mode::Naive, Mode::FullContinuation)));
  }
  return out;
}

std::vector<BoundState> hidden_pair(const GpeConfig& cfg, double gamma_cr, double detour) {
  if (cfg.gamma.imag() != 0.0 || cfg.asym != 0.0) {
    throw Error(Errc::InvalidConfig, "hidden states need real gamma and A = 0");
  }
  if (!(detour > 0.0) || !(gamma_cr - detour > 0.0)) {
    throw Error(Errc::InvalidConfig, "detour must lie inside (0, gamma_cr)");
  }
  GpeConfig anchor = cfg;
  anchor.gamma = gamma_cr + detour;
  anchor.mode = Mode::FullContinuation;
  const std::vector<BoundState> triple = triple_point_states(anchor);
  const double target = cfg.gamma.real();
  const double below = gamma_cr - detour;
  std::vector<BoundState> out;
  for (std::size_t i = 1; i < triple.size(); ++i) {
    BoundState s = gpe::transport(
        [&](double t) {
          GpeConfig c = anchor;
          c.gamma = gamma_cr + detour * std::exp(kI * (std::numbers::pi * t));
          return c;
        },
        triple[i], 0.05, 0.02);
    if (target != below) {
      s = gpe::transport(
          [&](double t) {
            GpeConfig c = anchor;
            c.gamma = below + t * (target - below);
            return c;
          },
          s, 0.05, 0.05);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::unique_ptr<GpeProvider> gamma_contour_provider(const GpeConfig& cfg, const ContourSpec& spec) {
  spec.validate();
  if (spec.parameter != ContourParameter::Gamma) {
    throw Error(Errc::InvalidConfig, "gamma contour expected");
  }
  const Complex start = spec.point(0.0);
  if (std::abs(start.imag()) > 1e-14) {
    throw Error(Errc::InvalidConfig, "gamma contour must start on the real axis");
  }
  GpeConfig anchor = cfg;
  anchor.gamma = start.real();
  anchor.asym = 0.0;
  return std::make_unique<GpeProvider>(anchor, ContourParameter::Gamma, Complex(start.real(), 0.0),
                                       triple_point_states(anchor),
                                       std::vector<std::string>{"ground", "broken+", "broken-"});
}

std::unique_ptr<GpeProvider> asymmetry_contour_provider(const GpeConfig& cfg,
                                                        const ContourSpec& spec, double detour) {
  spec.validate();
  if (spec.parameter != ContourParameter::AsymmetryA) {
    throw Error(Errc::InvalidConfig, "asymmetry contour expected");
  }
  if (cfg.gamma.imag() != 0.0) throw Error(Errc::InvalidConfig, "gamma must be real");
  const double gamma0 = cfg.gamma.real();
  GpeConfig anchor = cfg;
  anchor.gamma = gamma0 + detour;
  anchor.asym = 0.0;
  anchor.mode = Mode::FullContinuation;
  std::vector<BoundState> states = triple_point_states(anchor);

  const Complex a_start = spec.point(0.0);
  const Complex top = gamma0 + kI * detour;
  auto along = [&](const gpe::ConfigPath& path) {
    for (BoundState& s : states) s = gpe::transport(path, s, 0.05, 0.05);
  };
  along([&](double t) {
    GpeConfig c = anchor;
    c.gamma = gamma0 + detour * std::exp(kI * (0.5 * std::numbers::pi * t));
    return c;
  });
  along([&](double t) {
    GpeConfig c = anchor;
    c.gamma = top;
    c.asym = t * a_start;
    return c;
  });
  along([&](double t) {
    GpeConfig c = anchor;
    c.gamma = top + t * (gamma0 - top);
    c.asym = a_start;
    return c;
  });
  GpeConfig base = anchor;
  base.gamma = gamma0;
  return std::make_unique<GpeProvider>(base, ContourParameter::AsymmetryA, a_start,
                                       std::move(states),
                                       std::vector<std::string>{"ground", "broken+", "broken-"});
}

}  // namespace ptbec::ep
