#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ptbec/acceptance.hpp"
#include "ptbec/ep_analysis.hpp"
#include "ptbec/gpe.hpp"
#include "ptbec/io.hpp"
#include "ptbec/matrix_model.hpp"

namespace ptbec::cli {

namespace {

using gpe::BoundState;
using gpe::GpeConfig;
using gpe::Mode;
using io::Cell;
using io::Table;
using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int points = 200;

  std::vector<double> grid() const {
    if (points == 1) return {start};
    std::vector<double> out;
    for (int i = 0; i < points; ++i) out.push_back(start + (stop - start) * i / (points - 1));
    return out;
  }
};

Range parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(Errc::InvalidConfig, "range must read start:stop[:points], got '" + text + "'");
  }
  Range r;
  try {
    r.start = std::stod(parts[0]);
    r.stop = std::stod(parts[1]);
    if (parts.size() == 3) r.points = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidConfig, "cannot parse range '" + text + "'");
  }
  if (r.points < 1) throw Error(Errc::InvalidConfig, "range needs at least one point");
  return r;
}

Complex parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(text), 0.0};
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(Errc::InvalidConfig, "cannot parse complex value '" + text + "'");
  }
}

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

struct Options {
  double g = 1.0;
  double a = 2.2;
  double gamma = 0.0;
  std::string gamma_text;
  std::string gamma_range;
  double asym = 0.0;
  std::string mode = "naive";
  std::string center;
  double radius = 0.04;
  int steps = 64;
  int turns = 1;
  bool clockwise = false;
  std::string provider = "gpe";
  std::string parameter = "gamma";
  double fixed = kNaN;
  std::vector<double> g_list{0.2, 0.1, 0.02};
  std::vector<double> gamma_list{0.0, 0.1, 0.2, 0.3};
  double x_range = 6.0;
  std::vector<int> only;
  std::string out = "-";
  std::string format = "csv";
  double ode_tol = 1e-12;
  double newton_tol = 1e-10;
};

GpeConfig gpe_config(const Options& o) {
  GpeConfig c;
  c.g = o.g;
  c.a = o.a;
  c.gamma = o.gamma;
  c.asym = o.asym;
  c.mode = gpe::mode_from_string(o.mode);
  c.ode_tol = o.ode_tol;
  c.newton_tol = o.newton_tol;
  c.validate();
  return c;
}

ordered_json gpe_meta(const GpeConfig& c) {
  return {{"g", c.g},           {"a", c.a},
          {"asym", c.asym.real()}, {"mode", gpe::to_string(c.mode)},
          {"ode_tol", c.ode_tol}, {"newton_tol", c.newton_tol},
          {"symmetry_tol", c.symmetry_tol}};
}

ordered_json base_meta(const std::string& command) {
  return {{"command", command}, {"version", io::kVersion}};
}

void emit(const Options& o, const Table& t, std::ostream& out) {
  const io::Format f = io::format_from_string(o.format);
  if (o.out.empty() || o.out == "-") {
    io::write(out, t, f);
    return;
  }
  std::ofstream os(o.out);
  if (!os) throw Error(Errc::InvalidConfig, "cannot open '" + o.out + "' for writing");
  io::write(os, t, f);
}

/// Critical point of the A = 0 problem, unless --contour-center overrides it.
double critical_gamma(const Options& o, const GpeConfig& cfg, ordered_json& meta, std::ostream& err) {
  if (!o.center.empty()) {
    const double v = parse_complex(o.center).real();
    meta["gamma_cr"] = v;
    meta["gamma_cr_source"] = "contour-center";
    return v;
  }
  GpeConfig c = cfg;
  c.mode = Mode::Naive;
  const gpe::CriticalPoints cp = gpe::find_critical_points(c);
  meta["gamma_cr"] = cp.gamma_cr;
  meta["gamma_bp"] = cp.gamma_bp;
  meta["gamma_cr_source"] = "detected";
  err << "gamma_cr = " << cp.gamma_cr << ", gamma_bp = " << cp.gamma_bp << '\n';
  return cp.gamma_cr;
}

BoundState to_mode(const BoundState& s, const GpeConfig& cfg) {
  if (s.mode == cfg.mode) return s;
  return gpe::solve_bound_state(cfg, gpe::convert_unknowns(s.unknowns, s.mode, cfg.mode));
}

BoundState move_gamma(const GpeConfig& cfg, const BoundState& s, double from, double to) {
  return gpe::transport(
      [&](double t) { return gpe::with_parameter(cfg, gpe::SweepParameter::Gamma, from + t * (to - from)); },
      s, 0.05, 1.0);
}

struct BranchRows {
  std::string label;
  std::map<std::size_t, std::pair<std::optional<BoundState>, std::string>> rows;
};

/// Follows `seed` (valid at grid[first]) over grid[first..last] in the given
/// direction. Once a step fails, the remaining points carry the error status.
void follow(const GpeConfig& cfg, const std::vector<double>& grid, BoundState seed, std::size_t first,
            long last, BranchRows& b, bool real_only) {
  const long dir = last >= static_cast<long>(first) ? 1 : -1;
  std::optional<BoundState> cur = std::move(seed);
  double at = grid[first];
  std::string failure;
  for (long i = static_cast<long>(first); dir > 0 ? i <= last : i >= last; i += dir) {
    if (!failure.empty()) {
      b.rows[i] = {std::nullopt, failure};
      continue;
    }
    try {
      BoundState next = grid[i] == at ? *cur : move_gamma(cfg, *cur, at, grid[i]);
      if (real_only && std::abs(next.kappa.imag()) > 1e-6) {
        throw Error(Errc::BranchLost, "real branch turned complex");
      }
      cur = next;
      at = grid[i];
      b.rows[i] = {std::move(next), "ok"};
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidConfig) throw;
      failure = to_string(e.code());
      b.rows[i] = {std::nullopt, failure};
    }
  }
}

int cmd_spectrum_gpe(const Options& o, std::ostream& out, std::ostream& err) {
  GpeConfig cfg = gpe_config(o);
  const Range range = parse_range(o.gamma_range.empty() ? "0:0.5:200" : o.gamma_range);
  const std::vector<double> grid = range.grid();
  Table t;
  t.meta = base_meta("spectrum-gpe");
  t.meta["config"] = gpe_meta(cfg);
  t.meta["gamma_range"] = {range.start, range.stop, range.points};
  t.columns = {"gamma", "branch", "kappa_re", "kappa_im", "pt_class", "symmetry_defect", "status"};

  std::vector<BranchRows> branches;
  {
    GpeConfig start = cfg;
    start.gamma = grid.front();
    start.mode = Mode::Naive;
    std::vector<BoundState> pair;
    std::string failure;
    try {
      pair = gpe::symmetric_pair(start);
      start.mode = cfg.mode;
      for (BoundState& s : pair) s = to_mode(s, start);
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidConfig) throw;
      failure = to_string(e.code());
    }
    const char* names[] = {"ground", "excited"};
    for (std::size_t k = 0; k < 2; ++k) {
      BranchRows b{names[k], {}};
      if (k < pair.size()) {
        follow(cfg, grid, pair[k], 0, static_cast<long>(grid.size()) - 1, b, true);
      } else {
        for (std::size_t i = 0; i < grid.size(); ++i) b.rows[i] = {std::nullopt, failure.empty() ? "BranchLost" : failure};
      }
      branches.push_back(std::move(b));
    }
  }

  const bool with_broken = cfg.mode != Mode::PtContinued && cfg.asym == 0.0;
  if (with_broken) {
    const double gcr = critical_gamma(o, cfg, t.meta, err);
    std::size_t first = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] > gcr + 1e-9) {
        first = i;
        break;
      }
    }
    BranchRows plus{"broken+", {}}, minus{"broken-", {}};
    if (first < grid.size()) {
      GpeConfig at = cfg;
      at.gamma = grid[first];
      at.mode = Mode::Naive;
      std::vector<BoundState> pair;
      try {
        pair = gpe::broken_pair(at);
        at.mode = cfg.mode;
        for (BoundState& s : pair) s = to_mode(s, at);
      } catch (const Error& e) {
        if (e.code() == Errc::InvalidConfig) throw;
        for (std::size_t i = first; i < grid.size(); ++i) {
          plus.rows[i] = minus.rows[i] = {std::nullopt, to_string(e.code())};
        }
      }
      if (pair.size() == 2) {
        follow(cfg, grid, pair[0], first, static_cast<long>(grid.size()) - 1, plus, false);
        follow(cfg, grid, pair[1], first, static_cast<long>(grid.size()) - 1, minus, false);
      }
    }
    branches.push_back(std::move(plus));
    branches.push_back(std::move(minus));

    if (cfg.mode == Mode::FullContinuation && cfg.g > 0.0) {
      const double below = gcr - o.radius;
      t.meta["detour"] = o.radius;
      BranchRows ha{"hidden-a", {}}, hb{"hidden-b", {}};
      std::vector<BoundState> seeds;
      GpeConfig at = cfg;
      at.gamma = below;
      std::string failure;
      try {
        seeds = ep::hidden_pair(at, gcr, o.radius);
      } catch (const Error& e) {
        if (e.code() == Errc::InvalidConfig) throw;
        failure = to_string(e.code());
      }
      // Grid points below gamma_cr - detour walk down, the rest up towards gamma_cr.
      std::vector<double> down{below}, up{below};
      std::vector<std::size_t> down_idx, up_idx;
      for (std::size_t i = grid.size(); i-- > 0;) {
        if (grid[i] <= below) {
          down.push_back(grid[i]);
          down_idx.push_back(i);
        }
      }
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] > below && grid[i] < gcr) {
          up.push_back(grid[i]);
          up_idx.push_back(i);
        }
      }
      BranchRows* targets[] = {&ha, &hb};
      for (std::size_t k = 0; k < 2; ++k) {
        for (const auto* part : {&down_idx, &up_idx}) {
          const std::vector<double>& path = part == &down_idx ? down : up;
          if (part->empty()) continue;
          if (seeds.size() != 2) {
            for (std::size_t i : *part) targets[k]->rows[i] = {std::nullopt, failure};
            continue;
          }
          BranchRows tmp{"", {}};
          follow(cfg, path, seeds[k], 0, static_cast<long>(path.size()) - 1, tmp, false);
          for (std::size_t j = 0; j < part->size(); ++j) targets[k]->rows[(*part)[j]] = tmp.rows[j + 1];
        }
      }
      branches.push_back(std::move(ha));
      branches.push_back(std::move(hb));
    }
  }

  bool any_failure = false;
  for (const BranchRows& b : branches) {
    for (const auto& [i, row] : b.rows) {
      const auto& [state, status] = row;
      if (status != "ok") any_failure = true;
      t.add_row({grid[i], b.label, state ? state->kappa.real() : kNaN, state ? state->kappa.imag() : kNaN,
                 state ? gpe::to_string(state->pt_class) : "", state ? state->symmetry_defect : kNaN,
                 status});
    }
  }
  emit(o, t, out);
  if (any_failure) err << "some rows carry a solver status other than ok\n";
  return 0;
}

int cmd_spectrum_matrix(const Options& o, std::ostream& out, std::ostream&) {
  const Range range = parse_range(o.gamma_range.empty() ? "0:1:200" : o.gamma_range);
  if (!(o.g >= 0.0 && o.g < 2.0)) throw Error(Errc::InvalidConfig, "g must lie in [0, 2)");
  Table t;
  t.meta = base_meta("spectrum-matrix");
  t.meta["g"] = o.g;
  t.meta["gamma_range"] = {range.start, range.stop, range.points};
  t.meta["gamma_cr"] = model::gamma_critical(o.g);
  t.columns = {"gamma"};
  for (const char* name : {"E1", "E2", "E3", "E4"}) {
    for (const std::string& c : io::complex_columns(name)) t.columns.push_back(c);
  }
  t.columns.push_back("status");
  for (double gamma : range.grid()) {
    std::vector<Cell> row{gamma};
    try {
      const model::ModelSpectrum e = model::eigenvalues({o.g, gamma});
      for (Complex v : {e.e1, e.e2, e.e3, e.e4}) io::push_complex(row, v);
      row.emplace_back("ok");
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidConfig) throw;
      row.resize(1);
      for (int k = 0; k < 8; ++k) row.emplace_back(kNaN);
      row.emplace_back(to_string(e.code()));
    }
    t.add_row(std::move(row));
  }
  emit(o, t, out);
  return 0;
}

int cmd_encircle(const Options& o, std::ostream& out, std::ostream& err) {
  Table t;
  t.meta = base_meta("encircle");
  ep::ContourSpec spec;
  spec.radius = o.radius;
  spec.n_steps = o.steps;
  spec.turns = o.turns;
  spec.orientation = o.clockwise ? ep::Orientation::Clockwise : ep::Orientation::CounterClockwise;
  std::unique_ptr<ep::SpectrumProvider> provider;
  std::unique_ptr<ep::MatrixModelProvider> model_provider;

  if (o.provider == "matrix") {
    if (o.parameter != "gamma") throw Error(Errc::InvalidConfig, "matrix provider encircles gamma");
    spec.parameter = ep::ContourParameter::ModelGamma;
    spec.center = o.center.empty() ? Complex(model::gamma_critical(o.g)) : parse_complex(o.center);
    t.meta["g"] = o.g;
    provider = std::make_unique<ep::MatrixModelProvider>(o.g);
  } else if (o.provider == "appendix") {
    if (o.parameter == "y") {
      spec.parameter = ep::ContourParameter::AppendixY;
    } else if (o.parameter == "eps") {
      spec.parameter = ep::ContourParameter::AppendixEps;
    } else {
      throw Error(Errc::InvalidConfig, "appendix provider encircles y or eps");
    }
    const bool on_y = spec.parameter == ep::ContourParameter::AppendixY;
    const double fixed = std::isnan(o.fixed) ? (on_y ? 1e-3 : 1.0) : o.fixed;
    spec.center = o.center.empty() ? Complex(on_y ? 1.0 : 0.0) : parse_complex(o.center);
    t.meta["fixed"] = fixed;
    provider = std::make_unique<ep::AppendixProvider>(spec.parameter, fixed);
  } else if (o.provider == "gpe") {
    GpeConfig cfg = gpe_config(o);
    cfg.mode = Mode::FullContinuation;
    t.meta["config"] = gpe_meta(cfg);
    if (o.parameter == "gamma") {
      spec.parameter = ep::ContourParameter::Gamma;
      if (o.center.empty()) {
        spec.center = critical_gamma(o, cfg, t.meta, err);
      } else {
        spec.center = parse_complex(o.center);
      }
      spec.validate();
      provider = ep::gamma_contour_provider(cfg, spec);
    } else if (o.parameter == "asym") {
      spec.parameter = ep::ContourParameter::AsymmetryA;
      Options probe = o;
      probe.center.clear();
      if (o.gamma_text.empty()) {
        cfg.gamma = critical_gamma(probe, cfg, t.meta, err);
      } else {
        cfg.gamma = o.gamma;
      }
      cfg.asym = 0.0;
      t.meta["gamma"] = cfg.gamma.real();
      spec.center = o.center.empty() ? Complex(0.0) : parse_complex(o.center);
      spec.validate();
      provider = ep::asymmetry_contour_provider(cfg, spec);
    } else {
      throw Error(Errc::InvalidConfig, "gpe provider encircles gamma or asym");
    }
  } else {
    throw Error(Errc::InvalidConfig, "unknown provider '" + o.provider + "'");
  }
  spec.validate();
  t.meta["provider"] = o.provider;
  t.meta["contour"] = {{"parameter", ep::to_string(spec.parameter)},
                       {"center", complex_json(spec.center)},
                       {"radius", spec.radius},
                       {"steps", spec.n_steps},
                       {"turns", spec.turns},
                       {"orientation", o.clockwise ? "clockwise" : "counterclockwise"}};

  const ep::BranchTrace trace = ep::trace_contour(*provider, spec);
  const ep::PermutationResult perm = ep::classify(trace);
  t.meta["labels"] = trace.labels;
  t.meta["classification"] = ep::to_string(perm.classification);
  t.meta["mapping"] = perm.mapping;
  t.meta["cycle_structure"] = perm.cycle_structure;
  t.meta["refinements"] = trace.refinements;
  if (o.provider == "matrix") {
    ep::MatrixModelProvider vectors(o.g);
    t.meta["eigenvector_mapping"] = ep::eigenvector_permutation(vectors, trace).mapping;
  }

  t.columns = {"step", "param_re", "param_im"};
  for (const std::string& label : trace.labels) {
    for (const std::string& c : io::complex_columns(label)) t.columns.push_back(c);
  }
  for (Eigen::Index r = 0; r < trace.values.rows(); ++r) {
    std::vector<Cell> row{static_cast<long long>(r)};
    io::push_complex(row, trace.parameters[r]);
    for (Eigen::Index k = 0; k < trace.values.cols(); ++k) io::push_complex(row, trace.values(r, k));
    t.add_row(std::move(row));
  }
  emit(o, t, out);
  err << ep::to_string(perm.classification) << " mapping";
  for (int j : perm.mapping) err << ' ' << j;
  err << '\n';
  return 0;
}

struct Parity {
  double even = 0.0;
  double odd = 0.0;
  double peak = 0.0;
};

/// Defects relative to the largest part of the whole wave function.
Parity parity(const std::vector<gpe::WaveSample>& psi, double Bicomplex::*part) {
  Parity p;
  const std::size_t n = psi.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Bicomplex& v = psi[i].psi;
    scale = std::max({scale, std::abs(v.rr), std::abs(v.ri), std::abs(v.ir), std::abs(v.ii)});
    const double f = v.*part, m = psi[n - 1 - i].psi.*part;
    p.even = std::max(p.even, std::abs(f - m));
    p.odd = std::max(p.odd, std::abs(f + m));
    p.peak = std::max(p.peak, std::abs(f));
  }
  if (scale > 0.0) {
    p.even /= scale;
    p.odd /= scale;
  }
  return p;
}

int cmd_wavefunctions(const Options& o, std::ostream& out, std::ostream& err) {
  GpeConfig cfg = gpe_config(o);
  cfg.mode = Mode::FullContinuation;
  if (o.gamma_list.empty()) throw Error(Errc::InvalidConfig, "need at least one gamma");
  Table t;
  t.meta = base_meta("wavefunctions");
  t.meta["config"] = gpe_meta(cfg);
  t.meta["gammas"] = o.gamma_list;
  t.meta["x_range"] = o.x_range;
  t.meta["detour"] = o.radius;
  t.columns = {"gamma", "branch", "x", "psi_rr", "psi_ri", "psi_ir", "psi_ii"};
  const double gcr = critical_gamma(o, cfg, t.meta, err);

  std::vector<std::pair<double, std::vector<std::pair<std::string, BoundState>>>> sets;
  bool failed = false;
  std::vector<BoundState> hidden;
  double hidden_at = gcr - o.radius;
  for (double gamma : o.gamma_list) {
    std::vector<std::pair<std::string, BoundState>> states;
    GpeConfig at = cfg;
    at.gamma = gamma;
    try {
      GpeConfig naive = at;
      naive.mode = Mode::Naive;
      const std::vector<BoundState> sym = gpe::symmetric_pair(naive);
      states.emplace_back("ground", to_mode(sym.at(0), at));
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidConfig) throw;
      err << "ground state at gamma " << gamma << ": " << e.what() << '\n';
      failed = true;
    }
    if (gamma < gcr && cfg.g > 0.0) {
      try {
        if (hidden.empty()) {
          GpeConfig seed = at;
          seed.gamma = hidden_at;
          hidden = ep::hidden_pair(seed, gcr, o.radius);
        }
        for (BoundState& s : hidden) s = move_gamma(at, s, hidden_at, gamma);
        hidden_at = gamma;
        states.emplace_back("hidden-a", hidden[0]);
        states.emplace_back("hidden-b", hidden[1]);
      } catch (const Error& e) {
        if (e.code() == Errc::InvalidConfig) throw;
        err << "hidden pair at gamma " << gamma << ": " << e.what() << '\n';
        hidden.clear();
        hidden_at = gcr - o.radius;
        failed = true;
      }
    }
    sets.emplace_back(gamma, std::move(states));
  }

  ordered_json diagnostics = ordered_json::array();
  for (const auto& [gamma, states] : sets) {
    for (const auto& [label, s] : states) {
      ordered_json d = {{"gamma", gamma},
                        {"branch", label},
                        {"kappa", complex_json(s.kappa)},
                        {"symmetry_defect", s.symmetry_defect},
                        {"norm", s.norm}};
      const std::pair<const char*, double Bicomplex::*> parts[] = {
          {"psi_rr", &Bicomplex::rr}, {"psi_ri", &Bicomplex::ri}, {"psi_ir", &Bicomplex::ir}, {"psi_ii", &Bicomplex::ii}};
      for (const auto& [name, part] : parts) {
        const Parity p = parity(s.psi, part);
        d[name] = {{"max_abs", p.peak}, {"even_defect", p.even}, {"odd_defect", p.odd}};
      }
      diagnostics.push_back(std::move(d));
      for (const gpe::WaveSample& w : s.psi) {
        if (std::abs(w.x) > o.x_range) continue;
        t.add_row({gamma, label, w.x, w.psi.rr, w.psi.ri, w.psi.ir, w.psi.ii});
      }
    }
  }
  t.meta["diagnostics"] = std::move(diagnostics);
  emit(o, t, out);
  return failed ? 1 : 0;
}

int cmd_scalar_product(const Options& o, std::ostream& out, std::ostream&) {
  const Range range = parse_range(o.gamma_range.empty() ? "0:1:200" : o.gamma_range);
  if (o.g_list.empty()) throw Error(Errc::InvalidConfig, "need at least one g");
  Table t;
  t.meta = base_meta("scalar-product");
  t.meta["g"] = o.g_list;
  t.meta["gamma_range"] = {range.start, range.stop, range.points};
  t.columns = {"g", "gamma", "sp_re", "sp_im", "real", "series_c0", "series_c_half", "status"};
  for (double g : o.g_list) {
    for (double gamma : range.grid()) {
      std::vector<Cell> row{g, gamma};
      try {
        const Complex v = model::scalar_product_e4({g, gamma});
        io::push_complex(row, v);
        row.emplace_back(static_cast<long long>(std::abs(v.imag()) < 1e-12 ? 1 : 0));
      } catch (const Error& e) {
        if (e.code() == Errc::InvalidConfig) throw;
        row.insert(row.end(), {kNaN, kNaN, 0LL});
      }
      if (gamma >= 0.0 && gamma <= 1.0) {
        const auto [c0, c_half] = model::scalar_product_series(gamma);
        row.insert(row.end(), {c0, c_half});
      } else {
        row.insert(row.end(), {kNaN, kNaN});
      }
      row.emplace_back(std::isnan(std::get<double>(row[2])) ? "DegenerateDenominator" : "ok");
      t.add_row(std::move(row));
    }
  }
  emit(o, t, out);
  return 0;
}

int cmd_acceptance(const Options& o, std::ostream& out, std::ostream&) {
  const auto results = acceptance::run(o.only, [&](const acceptance::CriterionResult& r) {
    out << acceptance::format(r) << std::endl;
  });
  int passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  out << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Output file, - for stdout")->capture_default_str();
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json", "CSV", "JSON"}))
      ->capture_default_str();
}

void add_gpe(CLI::App* cmd, Options& o) {
  cmd->add_option("--g", o.g, "Nonlinearity")->capture_default_str();
  cmd->add_option("--a", o.a, "Well separation")->capture_default_str();
  cmd->add_option("--asym", o.asym, "Asymmetry A")->capture_default_str();
  cmd->add_option("--mode", o.mode, "naive, pt or full")
      ->check(CLI::IsMember({"naive", "pt", "full", "NAIVE", "PT_CONTINUED", "FULL_CONTINUATION"}))
      ->capture_default_str();
  cmd->add_option("--ode-tol", o.ode_tol, "Integrator tolerance")->capture_default_str();
  cmd->add_option("--newton-tol", o.newton_tol, "Newton residual tolerance")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bound states of a PT-symmetric double-delta condensate and their exceptional points"};
  app.require_subcommand(1);
  Options o;

  CLI::App* sg = app.add_subcommand("spectrum-gpe", "kappa along a gamma sweep, one row per gamma and branch");
  add_gpe(sg, o);
  sg->add_option("--gamma-range", o.gamma_range, "start:stop[:points], default 0:0.5:200");
  sg->add_option("--contour-center", o.center, "gamma_cr to use instead of detecting it");
  sg->add_option("--contour-radius", o.radius, "Detour radius around gamma_cr")->capture_default_str();
  add_output(sg, o);

  CLI::App* sm = app.add_subcommand("spectrum-matrix", "E1..E4 of the matrix model along a gamma sweep");
  sm->add_option("--g", o.g, "Coupling")->capture_default_str();
  sm->add_option("--gamma-range", o.gamma_range, "start:stop[:points], default 0:1:200");
  add_output(sm, o);

  CLI::App* en = app.add_subcommand("encircle", "Follow the spectrum around a closed contour");
  add_gpe(en, o);
  en->add_option("--provider", o.provider, "gpe, matrix or appendix")
      ->check(CLI::IsMember({"gpe", "matrix", "appendix"}))
      ->capture_default_str();
  en->add_option("--parameter", o.parameter, "gamma or asym (gpe), gamma (matrix), y or eps (appendix)")
      ->capture_default_str();
  en->add_option("--gamma", o.gamma_text, "gamma for an asym circle, default detected gamma_cr");
  en->add_option("--contour-center", o.center, "re or re,im; default at the critical point");
  en->add_option("--contour-radius", o.radius, "Contour radius")->capture_default_str();
  en->add_option("--steps", o.steps, "Steps per turn")->capture_default_str();
  en->add_option("--turns", o.turns, "Number of turns")->capture_default_str();
  en->add_flag("--clockwise", o.clockwise, "Traverse clockwise");
  en->add_option("--fixed", o.fixed, "Appendix: the parameter held fixed (eps=1e-3 or y=1)");
  add_output(en, o);

  CLI::App* wf = app.add_subcommand("wavefunctions", "Sampled bicomplex wave functions in the continued mode");
  add_gpe(wf, o);
  wf->add_option("--gamma", o.gamma_list, "Comma-separated gamma values")->delimiter(',')->capture_default_str();
  wf->add_option("--contour-center", o.center, "gamma_cr to use instead of detecting it");
  wf->add_option("--contour-radius", o.radius, "Detour radius around gamma_cr")->capture_default_str();
  wf->add_option("--x-range", o.x_range, "Emit samples with |x| <= x-range")->capture_default_str();
  add_output(wf, o);

  CLI::App* sp = app.add_subcommand("scalar-product", "Scalar product of the E4 eigenvector");
  sp->add_option("--g", o.g_list, "Comma-separated couplings")->delimiter(',')->capture_default_str();
  sp->add_option("--gamma-range", o.gamma_range, "start:stop[:points], default 0:1:200");
  add_output(sp, o);

  CLI::App* ac = app.add_subcommand("acceptance", "Run the acceptance criteria");
  ac->add_option("--only", o.only, "Comma-separated criterion ids")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!o.gamma_text.empty()) {
      try {
        o.gamma = std::stod(o.gamma_text);
      } catch (const std::exception&) {
        throw Error(Errc::InvalidConfig, "cannot parse gamma '" + o.gamma_text + "'");
      }
    }
    if (sg->parsed()) return cmd_spectrum_gpe(o, out, err);
    if (sm->parsed()) return cmd_spectrum_matrix(o, out, err);
    if (en->parsed()) return cmd_encircle(o, out, err);
    if (wf->parsed()) return cmd_wavefunctions(o, out, err);
    if (sp->parsed()) return cmd_scalar_product(o, out, err);
    if (ac->parsed()) return cmd_acceptance(o, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == Errc::InvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ptbec::cli
