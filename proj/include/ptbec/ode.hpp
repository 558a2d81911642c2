#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "ptbec/types.hpp"

namespace ptbec::ode {

struct Options {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 1e-2;
  double min_step = 1e-13;
  double max_step = 0.25;
  long max_steps = 2'000'000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <typename State>
double scaled_error(const State& err, const State& y0, const State& y1, const Options& opt) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    acc = std::max(acc, std::abs(err[i]) / scale);
  }
  return acc;
}

}  // namespace detail

/// Integrates y' = f(x, y) from x0 to x1 (either direction) with an adaptive
/// Dormand-Prince 5(4) pair and first-same-as-last reuse.
///
/// `stops` lists abscissae, ordered along the direction of integration, where
/// the integrator lands exactly and calls `observer(x, y)`. Throws
/// Errc::StepUnderflow when the step needed to meet the tolerance drops below
/// `min_step`.
template <typename State, typename Rhs, typename Observer>
State integrate(Rhs&& rhs, State y, double x0, double x1, const Options& opt,
                std::span<const double> stops, Observer&& observer, Stats* stats = nullptr) {
  using namespace detail;
  const double span = x1 - x0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;

  double x = x0;
  double h = std::min({opt.initial_step, opt.max_step, std::abs(span)});
  std::size_t next_stop = 0;
  while (next_stop < stops.size() && dir * (stops[next_stop] - x) <= 0.0) {
    if (stops[next_stop] == x) observer(x, y);
    ++next_stop;
  }

  State k1 = rhs(x, y);
  State k2, k3, k4, k5, k6, k7, y_new, err;
  long steps = 0;
  Stats local;

  while (dir * (x1 - x) > 0.0) {
    if (++steps > opt.max_steps) {
      throw Error(Errc::StepUnderflow, "step budget exhausted");
    }
    double target = x1;
    if (next_stop < stops.size() && dir * (stops[next_stop] - x1) < 0.0) {
      target = stops[next_stop];
    }
    bool lands = false;
    double step = h;
    if (step >= std::abs(target - x)) {
      step = std::abs(target - x);
      lands = true;
    }
    const double hs = dir * step;

    k2 = rhs(x + c2 * hs, y + hs * (a21 * k1));
    k3 = rhs(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    k4 = rhs(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = rhs(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = rhs(x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs(x + hs, y_new);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = scaled_error(err, y, y_new, opt);
    if (!std::isfinite(en)) {
      h = 0.25 * step;
      ++local.rejected;
      if (h < opt.min_step) throw Error(Errc::StepUnderflow, "non-finite state");
      continue;
    }
    if (en <= 1.0) {
      x = lands ? target : x + hs;
      y = std::move(y_new);
      k1 = std::move(k7);
      ++local.accepted;
      while (next_stop < stops.size() && dir * (stops[next_stop] - x) <= 0.0) {
        if (stops[next_stop] == x) observer(x, y);
        ++next_stop;
      }
      const double grow = en == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(en, -0.2));
      // Landing on a stop point shortens the step artificially; keep the old h.
      h = lands ? std::max(h, std::min(opt.max_step, step * grow))
                : std::min(opt.max_step, step * grow);
    } else {
      ++local.rejected;
      h = step * std::max(0.1, 0.9 * std::pow(en, -0.25));
      if (h < opt.min_step) {
        throw Error(Errc::StepUnderflow,
                    "cannot meet tolerance at x = " + std::to_string(x));
      }
    }
  }
  if (stats) {
    stats->accepted += local.accepted;
    stats->rejected += local.rejected;
  }
  return y;
}

template <typename State, typename Rhs>
State integrate(Rhs&& rhs, State y, double x0, double x1, const Options& opt,
                Stats* stats = nullptr) {
  return integrate(std::forward<Rhs>(rhs), std::move(y), x0, x1, opt, std::span<const double>{},
                   [](double, const State&) {}, stats);
}

}  // namespace ptbec::ode
