// Copyright 2026 The opgrowth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opgrowth/config.hpp"
#include "opgrowth/csv.hpp"
#include "opgrowth/errors.hpp"
#include "opgrowth/generator.hpp"
#include "opgrowth/gf_solver.hpp"
#include "opgrowth/integrate.hpp"
#include "opgrowth/observables.hpp"
#include "opgrowth/parallel.hpp"
#include "opgrowth/spectrum.hpp"
#include "opgrowth/trajectory.hpp"

namespace opgrowth::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, generic_failure = 1, config_error = 2, unsupported = 3, numerical_failure = 4 };

struct RunContext {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool svg = false;
  std::ostream* log = &std::cout;
};

/// Files written and, for `mc`, the verdict of the statistical comparison.
struct CommandResult {
  std::vector<std::filesystem::path> files;
  bool pass = true;
};

namespace detail {

inline std::string compact(const Json& j) { return j.dump(); }

/// Config with CLI overrides folded in, so the echo reproduces the run.
inline ExperimentConfig effective(ExperimentConfig cfg, const RunContext& ctx) {
  if (ctx.seed) {
    cfg.seed = *ctx.seed;
    cfg.source["seed"] = *ctx.seed;
  }
  return cfg;
}

inline void stamp(CsvTable& t, const std::string& command, const ExperimentConfig& cfg) {
  t.meta("opgrowth", kVersion);
  t.meta("command", command);
  t.meta("config", compact(cfg.source));
}

inline std::filesystem::path save(const CsvTable& t, const RunContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  const auto path = ctx.out_dir / name;
  t.save(path);
  return path;
}

/// File-name suffix identifying one initial condition of a sweep.
inline std::string run_label(const ExperimentConfig& cfg, std::size_t i) {
  if (!cfg.b.empty() || cfg.w0.size() == 1) return "";
  return "_w0_" + std::to_string(cfg.w0[i]);
}

inline std::string initial_label(const ExperimentConfig& cfg, std::size_t i) {
  return cfg.b.empty() ? std::to_string(cfg.w0[i]) : std::string("b");
}

/// ODE solution on an arbitrary increasing grid (the integrator itself starts at t = 0).
inline std::vector<WeightDistribution> ode_on_grid(const BandedGenerator& gen, const WeightDistribution& b0,
                                                   std::span<const double> times, double tol) {
  std::vector<double> grid(times.begin(), times.end());
  const bool prepend = grid.empty() || grid.front() != 0.0;
  if (prepend) grid.insert(grid.begin(), 0.0);
  EvolveOptions opt;
  opt.tol = tol;
  auto out = evolve(gen, b0, grid, opt);
  if (prepend) out.erase(out.begin());
  return out;
}

inline std::vector<std::string> observable_columns() {
  return {"t", "norm", "mean_w", "echo", "otoc_v1", "otoc_v2", "otoc_v3", "rotoc_v1", "rotoc_v2", "rotoc_v3"};
}

inline std::vector<CsvCell> observable_row(const ObservableSet& o) {
  return {o.t, o.norm, o.mean_w, o.echo, o.otoc[0], o.otoc[1], o.otoc[2], o.rotoc[0], o.rotoc[1], o.rotoc[2]};
}

/// GF series at each requested time for orders 0..order, computed in one pass per time.
inline std::vector<std::vector<TruncatedSeries>> gf_by_order(const ExperimentConfig& cfg, const WeightDistribution& b0,
                                                             std::span<const double> times, int order) {
  std::vector<std::vector<TruncatedSeries>> out(times.size());
  const double h = 1.0 / cfg.model.N;
  parallel_for(times.size(), [&](std::size_t i) {
    const GfTerms g = gf_terms(cfg.model, b0, times[i], order);
    out[i].push_back(g.g0);
    if (order >= 1) out[i].push_back(g.g0 + h * g.g1);
    if (order >= 2) out[i].push_back(out[i][1] + (h * h) * g.g2);
  });
  return out;
}

inline void require_corrections(const ExperimentConfig& cfg) {
  if (cfg.order >= 1 && !cfg.model.pure_interaction())
    throw UnsupportedError("order >= 1 needs pure two-body or pure three-body couplings; use order = 0");
}

/// Minimal line chart: axes, min/max tick labels, one polyline per series.
inline std::string svg_plot(const std::string& title, const std::vector<double>& x,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  static const char* colors[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  const double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  double x0 = x.front(), x1 = x.back(), y0 = INFINITY, y1 = -INFINITY;
  for (const auto& [name, y] : series)
    for (double v : y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  if (!(x1 > x0)) x1 = x0 + 1;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  auto label = [&](double xx, double yy, const std::string& text, const char* anchor) {
    s << "<text x=\"" << xx << "\" y=\"" << yy << "\" font-size=\"12\" text-anchor=\"" << anchor << "\">" << text
      << "</text>\n";
  };
  label(L, H - B + 18, format_number(x0), "middle");
  label(W - R, H - B + 18, format_number(x1), "middle");
  label(L - 6, H - B, format_number(y0), "end");
  label(L - 6, T + 4, format_number(y1), "end");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 6];
    s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::isfinite(series[k].second[i])) s << px(x[i]) << ',' << py(series[k].second[i]) << ' ';
    s << "\"/>\n";
    label(W - R - 4, T + 16 * (k + 1), series[k].first, "end");
    s << "<line x1=\"" << W - R - 110 << "\" y1=\"" << T + 16 * (k + 1) - 4 << "\" x2=\"" << W - R - 90 << "\" y2=\""
      << T + 16 * (k + 1) - 4 << "\" stroke=\"" << c << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline std::filesystem::path save_svg(const std::string& text, const RunContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  const auto path = ctx.out_dir / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  return path;
}

}  // namespace detail

/// ODE trajectories: observables per time and the full distribution b_w(t).
inline CommandResult cmd_evolve(const ExperimentConfig& config, const RunContext& ctx) {
  const ExperimentConfig cfg = detail::effective(config, ctx);
  const auto gen = build_generator(cfg.model);
  const auto times = cfg.time.values();
  const auto inits = cfg.initial_distributions();
  std::vector<std::vector<WeightDistribution>> traj(inits.size());
  parallel_for(inits.size(), [&](std::size_t i) { traj[i] = detail::ode_on_grid(gen, inits[i], times, cfg.tolerance); });

  CommandResult res;
  for (std::size_t i = 0; i < inits.size(); ++i) {
    CsvTable obs(detail::observable_columns()), dist({"t", "w", "b"});
    detail::stamp(obs, "evolve", cfg);
    detail::stamp(dist, "evolve", cfg);
    obs.meta("initial", detail::initial_label(cfg, i));
    dist.meta("initial", detail::initial_label(cfg, i));
    for (std::size_t g = 0; g < times.size(); ++g) {
      obs.row(detail::observable_row(observables(traj[i][g], cfg.model.N, times[g])));
      for (int w = 1; w <= cfg.model.N; ++w) dist.row({times[g], static_cast<long long>(w), traj[i][g].at(w)});
    }
    const std::string sfx = detail::run_label(cfg, i);
    res.files.push_back(detail::save(obs, ctx, "evolve" + sfx + ".csv"));
    res.files.push_back(detail::save(dist, ctx, "evolve_b" + sfx + ".csv"));
  }
  return res;
}

/// Generating-function predictions through cfg.order plus distribution snapshots.
inline CommandResult cmd_gf(const ExperimentConfig& config, const RunContext& ctx) {
  const ExperimentConfig cfg = detail::effective(config, ctx);
  detail::require_corrections(cfg);
  const auto times = cfg.time.values();
  const auto inits = cfg.initial_distributions();
  const int K = default_precision(cfg.model);
  const int w_show = std::min(cfg.model.N, K - 1);
  CommandResult res;
  for (std::size_t i = 0; i < inits.size(); ++i) {
    const std::string sfx = detail::run_label(cfg, i);
    const auto series = detail::gf_by_order(cfg, inits[i], times, cfg.order);
    CsvTable obs(detail::observable_columns());
    detail::stamp(obs, "gf", cfg);
    obs.meta("initial", detail::initial_label(cfg, i));
    obs.meta("order", std::to_string(cfg.order));
    obs.meta("truncation", std::to_string(K));
    for (std::size_t g = 0; g < times.size(); ++g)
      obs.row(detail::observable_row(observables(series[g].back(), cfg.model.N, times[g])));
    res.files.push_back(detail::save(obs, ctx, "gf" + sfx + ".csv"));

    const auto snaps = detail::gf_by_order(cfg, inits[i], cfg.snapshots, cfg.order);
    for (std::size_t s = 0; s < cfg.snapshots.size(); ++s) {
      std::vector<std::string> cols{"w"};
      for (int o = 0; o <= cfg.order; ++o) cols.push_back("c_w_order" + std::to_string(o));
      CsvTable snap(cols);
      detail::stamp(snap, "gf", cfg);
      snap.meta("initial", detail::initial_label(cfg, i));
      snap.meta("t", format_number(cfg.snapshots[s]));
      std::vector<double> norms;
      for (const auto& g : snaps[s]) norms.push_back(observables(g, cfg.model.N, cfg.snapshots[s]).norm);
      for (int w = 1; w <= w_show; ++w) {
        std::vector<CsvCell> row{static_cast<long long>(w)};
        for (std::size_t o = 0; o < snaps[s].size(); ++o) row.push_back(snaps[s][o][w] / norms[o]);
        snap.row(std::move(row));
      }
      res.files.push_back(
          detail::save(snap, ctx, "gf_snapshot" + sfx + "_t" + format_number(cfg.snapshots[s]) + ".csv"));
    }
  }
  return res;
}

/// Leading eigenvalues over the configured sizes, fitted as c0 + c1/N + c2/N^2 (+ c3/N^3).
inline CommandResult cmd_spectrum(const ExperimentConfig& config, const RunContext& ctx) {
  const ExperimentConfig cfg = detail::effective(config, ctx);
  const auto& Ns = cfg.spectrum.N_values;
  const int kmax = cfg.spectrum.k_max;
  if (Ns.size() < 3) throw ConfigError("'spectrum.N_values' needs at least 3 sizes for the 1/N fit");
  for (int n : Ns)
    if (n < kmax || n < cfg.model.max_body())
      throw ConfigError("'spectrum.N_values' entries must be >= k_max and >= the largest body order");
  std::vector<std::vector<std::complex<double>>> ev(Ns.size());
  parallel_for(Ns.size(), [&](std::size_t i) {
    ModelParams p = cfg.model;
    p.N = Ns[i];
    ev[i] = leading_eigenvalues(build_generator(p), kmax);
  });

  CsvTable raw({"N", "k", "re", "im"});
  detail::stamp(raw, "spectrum", cfg);
  for (std::size_t i = 0; i < Ns.size(); ++i)
    for (int k = 1; k <= kmax; ++k)
      raw.row({static_cast<long long>(Ns[i]), static_cast<long long>(k), ev[i][k - 1].real(), ev[i][k - 1].imag()});

  const int degree = default_fit_degree(Ns.size());
  const auto pure = cfg.model.pure_interaction();
  const LOSolution lo(cfg.model);
  CsvTable fit({"k", "fit_lambda0", "fit_lambda1", "fit_lambda2", "formula_lambda0", "formula_lambda1",
                "formula_lambda2"});
  detail::stamp(fit, "spectrum", cfg);
  fit.meta("fit_degree", std::to_string(degree));
  for (int k = 1; k <= kmax; ++k) {
    std::vector<double> vals;
    for (const auto& e : ev) vals.push_back(e[k - 1].real());
    const auto c = fit_inverse_n(Ns, vals, degree);
    const double f1 = pure ? eigen_correction(*pure, 1, k, cfg.model) : std::nan("");
    const double f2 = pure ? eigen_correction(*pure, 2, k, cfg.model) : std::nan("");
    fit.row({static_cast<long long>(k), c[0], c[1], c[2], lo.lambda(k), f1, f2});
  }
  CommandResult res;
  res.files.push_back(detail::save(fit, ctx, "spectrum.csv"));
  res.files.push_back(detail::save(raw, ctx, "spectrum_raw.csv"));
  return res;
}

/// Microscopic ensemble versus the ODE, judged at 3 standard errors.
inline CommandResult cmd_mc(const ExperimentConfig& config, const RunContext& ctx) {
  const ExperimentConfig cfg = detail::effective(config, ctx);
  const int N = cfg.model.N;
  if (N > kMaxPauliQubits) throw DomainError("mc: N must be <= 6 for the microscopic simulation");
  std::string label = cfg.mc.initial_pauli;
  if (label.empty()) {
    if (!cfg.b.empty() || cfg.w0.size() != 1) throw ConfigError("mc needs 'mc.initial_pauli' or a single 'initial.w0'");
    label.assign(N, 'I');
    std::fill_n(label.begin(), cfg.w0[0], 'X');
  }
  const PauliString P = PauliString::parse(label);
  if (P.n != N) throw ConfigError("'mc.initial_pauli' must have length model.N");
  const auto times = cfg.time.values();

  EnsembleOptions opt;
  opt.realizations = cfg.mc.realizations;
  opt.dt = cfg.mc.dt;
  opt.seed = cfg.seed;
  const EnsembleResult mc = run_ensemble(cfg.model, P, times, opt);
  const auto ode = detail::ode_on_grid(build_generator(cfg.model), WeightDistribution::delta(P.weight(), N), times,
                                       cfg.tolerance);

  CommandResult res;
  CsvTable tab({"t", "w", "b_mean", "b_stderr", "realizations", "b_ode", "z"});
  CsvTable norm({"t", "norm_mean", "norm_stderr", "norm_ode"});
  detail::stamp(tab, "mc", cfg);
  detail::stamp(norm, "mc", cfg);
  tab.meta("initial_pauli", label);
  std::ostringstream report;
  int failures = 0;
  for (std::size_t g = 0; g < times.size(); ++g) {
    for (int w = 1; w <= N; ++w) {
      const double m = mc.mean[g][w], se = mc.std_error[g][w], o = ode[g].at(w);
      const double z = se > 0 ? (m - o) / se : (m == o ? 0.0 : std::copysign(INFINITY, m - o));
      const bool ok = std::abs(m - o) <= 3 * se + 1e-12;
      if (!ok) {
        ++failures;
        report << "outside 3 sigma: t=" << format_number(times[g]) << " w=" << w << " mc=" << format_number(m)
               << " se=" << format_number(se) << " ode=" << format_number(o) << '\n';
      }
      tab.row({times[g], static_cast<long long>(w), m, se, static_cast<long long>(mc.realizations), o, z});
    }
    norm.row({times[g], mc.norm_mean[g], mc.norm_std_error[g], ode[g].total()});
  }
  res.pass = failures == 0;
  report << (res.pass ? "PASS" : "FAIL") << " mc vs ode: " << failures << " of " << times.size() * N
         << " entries outside 3 standard errors (R=" << mc.realizations << ")\n";
  res.files.push_back(detail::save(tab, ctx, "mc.csv"));
  res.files.push_back(detail::save(norm, ctx, "mc_norm.csv"));
  std::filesystem::create_directories(ctx.out_dir);
  {
    std::ofstream f(ctx.out_dir / "mc_report.txt", std::ios::binary);
    f << report.str();
  }
  res.files.push_back(ctx.out_dir / "mc_report.txt");
  *ctx.log << report.str();
  return res;
}

/// ODE versus GF mean weight for orders 0..cfg.order, with relative deviations.
inline CommandResult cmd_compare(const ExperimentConfig& config, const RunContext& ctx) {
  const ExperimentConfig cfg = detail::effective(config, ctx);
  detail::require_corrections(cfg);
  const auto times = cfg.time.values();
  const auto inits = cfg.initial_distributions();
  const auto gen = build_generator(cfg.model);
  std::vector<std::string> cols{"initial", "t", "ode_mean_w"};
  for (int o = 0; o <= cfg.order; ++o) cols.push_back("gf_mean_w_order" + std::to_string(o));
  for (int o = 0; o <= cfg.order; ++o) cols.push_back("rel_dev_order" + std::to_string(o));
  CsvTable tab(cols);
  detail::stamp(tab, "compare", cfg);
  for (std::size_t i = 0; i < inits.size(); ++i) {
    const auto ode = detail::ode_on_grid(gen, inits[i], times, cfg.tolerance);
    const auto gf = detail::gf_by_order(cfg, inits[i], times, cfg.order);
    std::vector<double> worst(cfg.order + 1, 0.0);
    for (std::size_t g = 0; g < times.size(); ++g) {
      const double ref = observables(ode[g], cfg.model.N, times[g]).mean_w;
      std::vector<CsvCell> row{detail::initial_label(cfg, i), times[g], ref};
      std::vector<double> dev;
      for (const auto& s : gf[g]) {
        const double v = observables(s, cfg.model.N, times[g]).mean_w;
        row.push_back(v);
        dev.push_back(std::abs(v - ref) / std::abs(ref));
      }
      for (std::size_t o = 0; o < dev.size(); ++o) {
        row.push_back(dev[o]);
        worst[o] = std::max(worst[o], dev[o]);
      }
      tab.row(std::move(row));
    }
    *ctx.log << "initial " << detail::initial_label(cfg, i) << ": max relative deviation of <w>";
    for (std::size_t o = 0; o < worst.size(); ++o) *ctx.log << "  order" << o << "=" << format_number(worst[o]);
    *ctx.log << '\n';
  }
  CommandResult res;
  res.files.push_back(detail::save(tab, ctx, "compare.csv"));
  return res;
}

/// Built-in parameters of the reference figures.
inline Json figure_config(const std::string& name) {
  if (name == "rho")
    return Json::parse(R"({"model":{"N":100,"kappa":0.5,"r":1.0,"couplings":{"2":1.0}},
      "initial":{"w0":[1,2,3,4]},"time":{"start":0,"stop":20,"count":81},"order":2})");
  if (name == "cw")
    return Json::parse(R"({"model":{"N":100,"kappa":0.5,"r":1.0,"couplings":{"2":1.0}},
      "initial":{"w0":3},"snapshots":[2,4],"order":2})");
  if (name == "l3")
    return Json::parse(R"({"model":{"N":100,"kappa":0.5,"r":1.0,"couplings":{"3":1.0}},
      "initial":{"w0":[1,2]},"time":{"start":0,"stop":10,"count":81},"order":2})");
  throw ConfigError("unknown figure '" + name + "' (expected rho, cw or l3)");
}

/// Regenerates figure data: mean weight panels (rho, l3) or distribution snapshots (cw).
inline CommandResult cmd_figures(const std::string& name, const std::optional<ExperimentConfig>& override_cfg,
                                 const RunContext& ctx) {
  const Json builtin = figure_config(name);
  const ExperimentConfig cfg = detail::effective(override_cfg ? *override_cfg : parse_config(builtin), ctx);
  detail::require_corrections(cfg);
  const auto gen = build_generator(cfg.model);
  const auto inits = cfg.initial_distributions();
  CommandResult res;
  std::vector<std::string> cols = name == "cw" ? std::vector<std::string>{"t", "w", "ode"}
                                               : std::vector<std::string>{"w0", "t", "ode"};
  for (int o = 0; o <= cfg.order; ++o) cols.push_back("order" + std::to_string(o));
  CsvTable tab(cols);
  detail::stamp(tab, "figures " + name, cfg);

  if (name == "cw") {
    if (cfg.snapshots.empty()) throw ConfigError("figure cw needs 'snapshots'");
    const int w_show = std::min(cfg.model.N, 30);
    for (std::size_t i = 0; i < inits.size(); ++i) {
      const auto ode = detail::ode_on_grid(gen, inits[i], cfg.snapshots, cfg.tolerance);
      const auto gf = detail::gf_by_order(cfg, inits[i], cfg.snapshots, cfg.order);
      for (std::size_t s = 0; s < cfg.snapshots.size(); ++s) {
        const double t = cfg.snapshots[s];
        const WeightDistribution c = normalize(ode[s]);
        std::vector<double> norms;
        for (const auto& g : gf[s]) norms.push_back(observables(g, cfg.model.N, t).norm);
        std::vector<double> xs;
        std::vector<std::pair<std::string, std::vector<double>>> lines{{"ode", {}}};
        for (std::size_t o = 0; o < gf[s].size(); ++o) lines.push_back({"order" + std::to_string(o), {}});
        for (int w = 1; w <= w_show; ++w) {
          std::vector<CsvCell> row{t, static_cast<long long>(w), c.at(w)};
          xs.push_back(w);
          lines[0].second.push_back(c.at(w));
          for (std::size_t o = 0; o < gf[s].size(); ++o) {
            const double v = w < gf[s][o].precision() ? gf[s][o][w] / norms[o] : 0.0;
            row.push_back(v);
            lines[o + 1].second.push_back(v);
          }
          tab.row(std::move(row));
        }
        if (ctx.svg)
          res.files.push_back(detail::save_svg(detail::svg_plot("c_w at t = " + format_number(t), xs, lines), ctx,
                                               "figure_cw_t" + format_number(t) + ".svg"));
      }
    }
  } else {
    const auto times = cfg.time.values();
    for (std::size_t i = 0; i < inits.size(); ++i) {
      const auto ode = detail::ode_on_grid(gen, inits[i], times, cfg.tolerance);
      const auto gf = detail::gf_by_order(cfg, inits[i], times, cfg.order);
      std::vector<std::pair<std::string, std::vector<double>>> lines{{"ode", {}}};
      for (int o = 0; o <= cfg.order; ++o) lines.push_back({"order" + std::to_string(o), {}});
      for (std::size_t g = 0; g < times.size(); ++g) {
        const double ref = observables(ode[g], cfg.model.N, times[g]).mean_w;
        std::vector<CsvCell> row{detail::initial_label(cfg, i), times[g], ref};
        lines[0].second.push_back(ref);
        for (std::size_t o = 0; o < gf[g].size(); ++o) {
          const double v = observables(gf[g][o], cfg.model.N, times[g]).mean_w;
          row.push_back(v);
          lines[o + 1].second.push_back(v);
        }
        tab.row(std::move(row));
      }
      if (ctx.svg)
        res.files.push_back(detail::save_svg(
            detail::svg_plot("<w> for initial " + detail::initial_label(cfg, i), times, lines), ctx,
            "figure_" + name + detail::run_label(cfg, i) + ".svg"));
    }
  }
  res.files.insert(res.files.begin(), detail::save(tab, ctx, "figure_" + name + ".csv"));
  return res;
}

inline int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return config_error;
  if (dynamic_cast<const UnsupportedError*>(&e)) return unsupported;
  if (dynamic_cast<const NumericalError*>(&e)) return numerical_failure;
  return generic_failure;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"opgrowth: operator-size growth in noisy Brownian circuits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string config_path, out_dir = ".", figure;
  std::uint64_t seed = 0;
  bool svg = false;
  const char* names[] = {"evolve", "gf", "spectrum", "mc", "figures", "compare"};
  const char* help[] = {"integrate the weight master equation",
                        "generating-function predictions with 1/N corrections",
                        "leading eigenvalues and their 1/N expansion",
                        "Monte Carlo of the microscopic circuit against the ODE",
                        "regenerate figure data: rho, cw or l3",
                        "ODE versus generating function, order by order"};
  std::map<std::string, CLI::App*> subs;
  for (int i = 0; i < 6; ++i) {
    auto* s = app.add_subcommand(names[i], help[i]);
    auto* c = s->add_option("--config", config_path, "config file (.toml, .json, or an output .csv)");
    if (std::string(names[i]) != "figures") c->required();
    else s->add_option("name", figure, "figure name")->required();
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--seed", seed, "random seed (overrides the config)");
    s->add_flag("--svg", svg, "also write SVG line plots (figures)");
    subs[names[i]] = s;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.svg = svg;
  ctx.log = &out;
  for (const auto& [n, s] : subs)
    if (s->parsed() && s->count("--seed")) ctx.seed = seed;
  try {
    CommandResult res;
    std::optional<ExperimentConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (subs["evolve"]->parsed()) res = cmd_evolve(*cfg, ctx);
    else if (subs["gf"]->parsed()) res = cmd_gf(*cfg, ctx);
    else if (subs["spectrum"]->parsed()) res = cmd_spectrum(*cfg, ctx);
    else if (subs["mc"]->parsed()) res = cmd_mc(*cfg, ctx);
    else if (subs["compare"]->parsed()) res = cmd_compare(*cfg, ctx);
    else res = cmd_figures(figure, cfg, ctx);
    for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
    return ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace opgrowth::cli
