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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opgrowth/errors.hpp"
#include "opgrowth/model.hpp"
#include "opgrowth/toml.hpp"

namespace opgrowth {

using Json = nlohmann::json;

enum class Spacing { linear, log };

struct TimeGrid {
  double start = 0.0;
  double stop = 10.0;
  int count = 101;
  Spacing spacing = Spacing::linear;

  std::vector<double> values() const {
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) {
      const double u = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      t[i] = spacing == Spacing::linear ? start + u * (stop - start)
                                        : start * std::pow(stop / start, u);
    }
    if (count > 1) t.back() = stop;
    return t;
  }
};

struct SpectrumConfig {
  std::vector<int> N_values{100, 200, 400, 800};
  int k_max = 3;
};

struct McConfig {
  long realizations = 10000;
  double dt = 1e-3;
  std::string initial_pauli;  // empty: X on the first w0 qubits
};

/// Validated experiment description; `source` keeps the normalized document for echoing.
struct ExperimentConfig {
  ModelParams model;
  std::vector<int> w0{1};
  std::vector<double> b;  // explicit initial distribution b_1, b_2, ...; overrides w0 when non-empty
  TimeGrid time;
  int order = 2;
  double tolerance = 1e-10;
  std::vector<double> snapshots;
  SpectrumConfig spectrum;
  McConfig mc;
  std::uint64_t seed = 1;
  Json source;

  /// Initial distributions to run: one per w0, or the explicit b.
  std::vector<WeightDistribution> initial_distributions() const {
    if (!b.empty()) {
      std::vector<double> v(model.N, 0.0);
      for (std::size_t i = 0; i < b.size(); ++i) v[i] = b[i];
      return {WeightDistribution(std::move(v))};
    }
    std::vector<WeightDistribution> out;
    for (int w : w0) out.push_back(WeightDistribution::delta(w, model.N));
    return out;
  }
};

namespace detail {

inline void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be a table");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

inline const Json& require(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + (where.empty() ? "" : where + ".") + key + "'");
  return obj.at(key);
}

inline double as_number(const Json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
  return v.get<double>();
}

inline long long as_integer(const Json& v, const std::string& name) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError("'" + name + "' must be an integer");
}

template <class T, class F>
std::vector<T> as_list(const Json& v, const std::string& name, F element) {
  std::vector<T> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(element(v[i], name + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(element(v, name));
  }
  return out;
}

}  // namespace detail

/// Validate a config document. Every failure names the offending key.
inline ExperimentConfig parse_config(const Json& doc) {
  using namespace detail;
  ExperimentConfig cfg;
  check_keys(doc, "", {"model", "initial", "time", "order", "tolerance", "snapshots", "spectrum", "mc", "seed"});

  const Json& m = require(doc, "", "model");
  check_keys(m, "model", {"N", "kappa", "r", "couplings"});
  const long long N = as_integer(require(m, "model", "N"), "model.N");
  if (N < 1 || N > 1000000) throw ConfigError("'model.N' must lie in [1, 1e6]");
  const double kappa = as_number(require(m, "model", "kappa"), "model.kappa");
  const double r = as_number(require(m, "model", "r"), "model.r");
  const Json& cp = require(m, "model", "couplings");
  if (!cp.is_object() || cp.empty()) throw ConfigError("'model.couplings' must be a non-empty table such as {\"2\": 1.0}");
  std::vector<CouplingSpec> couplings;
  for (const auto& [k, v] : cp.items()) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      throw ConfigError("coupling key 'model.couplings." + k + "' must be a body order such as \"2\"");
    }
    couplings.push_back({n, as_number(v, "model.couplings." + k)});
  }
  try {
    cfg.model = ModelParams(static_cast<int>(N), kappa, r, std::move(couplings));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }

  if (doc.contains("initial")) {
    const Json& in = doc.at("initial");
    check_keys(in, "initial", {"w0", "b"});
    if (in.contains("w0") && in.contains("b")) throw ConfigError("'initial' takes either 'w0' or 'b', not both");
    if (in.contains("w0")) {
      cfg.w0 = as_list<int>(in.at("w0"), "initial.w0",
                            [](const Json& v, const std::string& n) { return static_cast<int>(as_integer(v, n)); });
      if (cfg.w0.empty()) throw ConfigError("'initial.w0' must not be empty");
      for (int w : cfg.w0)
        if (w < 1 || w > N) throw ConfigError("'initial.w0' must lie in [1, model.N]");
    } else if (in.contains("b")) {
      cfg.b = as_list<double>(in.at("b"), "initial.b", as_number);
      if (cfg.b.empty() || cfg.b.size() > static_cast<std::size_t>(N))
        throw ConfigError("'initial.b' must hold between 1 and model.N entries (b_1 first)");
      double s = 0;
      for (double v : cfg.b) {
        if (!(v >= 0) || !std::isfinite(v)) throw ConfigError("'initial.b' entries must be finite and >= 0");
        s += v;
      }
      if (!(s > 0)) throw ConfigError("'initial.b' must not be all zero");
    } else {
      throw ConfigError("missing key 'initial.w0'");
    }
  }

  if (doc.contains("time")) {
    const Json& t = doc.at("time");
    check_keys(t, "time", {"start", "stop", "count", "spacing"});
    if (t.contains("start")) cfg.time.start = as_number(t.at("start"), "time.start");
    if (t.contains("stop")) cfg.time.stop = as_number(t.at("stop"), "time.stop");
    if (t.contains("count")) cfg.time.count = static_cast<int>(as_integer(t.at("count"), "time.count"));
    if (t.contains("spacing")) {
      const Json& s = t.at("spacing");
      if (s == "linear") cfg.time.spacing = Spacing::linear;
      else if (s == "log") cfg.time.spacing = Spacing::log;
      else throw ConfigError("'time.spacing' must be \"linear\" or \"log\"");
    }
  }
  const auto& tg = cfg.time;
  if (!(tg.start >= 0) || !std::isfinite(tg.stop) || tg.stop < tg.start)
    throw ConfigError("'time' needs 0 <= start <= stop");
  if (tg.count < 1 || tg.count > 1000000) throw ConfigError("'time.count' must lie in [1, 1e6]");
  if (tg.count > 1 && tg.stop == tg.start) throw ConfigError("'time.count' > 1 needs stop > start");
  if (tg.spacing == Spacing::log && !(tg.start > 0)) throw ConfigError("'time.spacing' = \"log\" needs start > 0");

  if (doc.contains("order")) {
    const long long o = as_integer(doc.at("order"), "order");
    if (o < 0 || o > 2) throw ConfigError("'order' must be 0, 1 or 2");
    cfg.order = static_cast<int>(o);
  }
  if (doc.contains("tolerance")) {
    cfg.tolerance = as_number(doc.at("tolerance"), "tolerance");
    if (!(cfg.tolerance > 0 && cfg.tolerance < 1)) throw ConfigError("'tolerance' must lie in (0, 1)");
  }
  if (doc.contains("snapshots")) {
    cfg.snapshots = as_list<double>(doc.at("snapshots"), "snapshots", as_number);
    for (double s : cfg.snapshots)
      if (!(s >= 0) || !std::isfinite(s)) throw ConfigError("'snapshots' must be finite times >= 0");
  }
  if (doc.contains("spectrum")) {
    const Json& s = doc.at("spectrum");
    check_keys(s, "spectrum", {"N_values", "k_max"});
    if (s.contains("N_values"))
      cfg.spectrum.N_values = as_list<int>(s.at("N_values"), "spectrum.N_values", [](const Json& v, const std::string& n) {
        return static_cast<int>(as_integer(v, n));
      });
    if (s.contains("k_max")) cfg.spectrum.k_max = static_cast<int>(as_integer(s.at("k_max"), "spectrum.k_max"));
    for (int n : cfg.spectrum.N_values)
      if (n < 2 || n > 20000) throw ConfigError("'spectrum.N_values' entries must lie in [2, 20000]");
    if (cfg.spectrum.k_max < 1) throw ConfigError("'spectrum.k_max' must be >= 1");
  }
  if (doc.contains("mc")) {
    const Json& s = doc.at("mc");
    check_keys(s, "mc", {"realizations", "dt", "initial_pauli"});
    if (s.contains("realizations")) cfg.mc.realizations = static_cast<long>(as_integer(s.at("realizations"), "mc.realizations"));
    if (s.contains("dt")) cfg.mc.dt = as_number(s.at("dt"), "mc.dt");
    if (s.contains("initial_pauli")) {
      if (!s.at("initial_pauli").is_string()) throw ConfigError("'mc.initial_pauli' must be a string such as \"XIII\"");
      cfg.mc.initial_pauli = s.at("initial_pauli").get<std::string>();
    }
  }
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.source = doc;
  return cfg;
}

/// Read a document: .json and .toml by extension; .csv reads the config echoed in its header.
inline Json read_config_document(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const std::string ext = path.extension().string();
  try {
    if (ext == ".toml") return toml::parse(text);
    if (ext == ".csv") {
      std::istringstream lines(text);
      const std::string tag = "# config: ";
      for (std::string line; std::getline(lines, line);) {
        if (line.rfind(tag, 0) == 0) return Json::parse(line.substr(tag.size()));
        if (line.empty() || line[0] != '#') break;
      }
      throw ConfigError("no '# config:' line in " + path.string());
    }
    if (ext == ".json") return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  throw ConfigError("unsupported config extension '" + ext + "' (use .toml, .json or an output .csv)");
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_config_document(path));
}

}  // namespace opgrowth
