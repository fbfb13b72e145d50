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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opgrowth/errors.hpp"

namespace opgrowth {

struct CouplingSpec {
  int n = 2;
  double a = 1.0;
};

/// Pure interaction classes for which corrections beyond leading order exist.
enum class Interaction { two_body, three_body };

inline const char* to_string(Interaction i) { return i == Interaction::two_body ? "two_body" : "three_body"; }

struct ModelParams {
  int N = 100;
  double kappa = 0.0;
  double r = 1.0;
  std::vector<CouplingSpec> couplings;

  ModelParams() = default;
  ModelParams(int N_, double kappa_, double r_, std::vector<CouplingSpec> c)
      : N(N_), kappa(kappa_), r(r_), couplings(std::move(c)) {
    validate();
  }

  static ModelParams pure(int n, int N, double kappa, double r, double a = 1.0) {
    return ModelParams(N, kappa, r, {{n, a}});
  }

  void validate() const {
    if (N < 1) throw DomainError("N must be >= 1");
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("r must lie in [0, 1]");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be finite and >= 0");
    if (couplings.empty()) throw DomainError("at least one coupling is required");
    for (std::size_t i = 0; i < couplings.size(); ++i) {
      const auto& c = couplings[i];
      if (c.n < 2) throw DomainError("body order must be >= 2");
      if (c.n > N) throw DomainError("body order " + std::to_string(c.n) + " exceeds N");
      if (!(c.a >= 0.0) || !std::isfinite(c.a)) throw DomainError("coupling strength must be >= 0");
      for (std::size_t j = 0; j < i; ++j)
        if (couplings[j].n == c.n) throw DomainError("duplicate body order " + std::to_string(c.n));
    }
  }

  double a_sigma() const {
    double s = 0;
    for (const auto& c : couplings) s += c.a;
    return s;
  }

  int max_body() const {
    int L = 0;
    for (const auto& c : couplings)
      if (c.a > 0) L = std::max(L, c.n);
    return L;
  }

  double strength(int n) const {
    for (const auto& c : couplings)
      if (c.n == n) return c.a;
    return 0.0;
  }

  /// The pure interaction class, if exactly one body order has nonzero strength and it is 2 or 3.
  std::optional<Interaction> pure_interaction() const {
    int count = 0, which = 0;
    for (const auto& c : couplings)
      if (c.a > 0) ++count, which = c.n;
    if (count != 1) return std::nullopt;
    if (which == 2) return Interaction::two_body;
    if (which == 3) return Interaction::three_body;
    return std::nullopt;
  }
};

/// b_w for w = 1..W_max, stored at index w-1.
struct WeightDistribution {
  std::vector<double> b;

  WeightDistribution() = default;
  explicit WeightDistribution(std::vector<double> values) : b(std::move(values)) {}

  static WeightDistribution delta(int w0, int w_max) {
    if (w0 < 1 || w0 > w_max) throw DomainError("initial weight must lie in [1, W_max]");
    WeightDistribution d(std::vector<double>(w_max, 0.0));
    d.b[w0 - 1] = 1.0;
    return d;
  }

  int w_max() const { return static_cast<int>(b.size()); }
  double at(int w) const { return (w >= 1 && w <= w_max()) ? b[w - 1] : 0.0; }
  std::span<const double> values() const { return b; }
  double total() const {
    double s = 0;
    for (double v : b) s += v;
    return s;
  }
  bool has_odd_support() const {
    for (int w = 1; w <= w_max(); w += 2)
      if (b[w - 1] != 0.0) return true;
    return false;
  }
  bool has_even_support() const {
    for (int w = 2; w <= w_max(); w += 2)
      if (b[w - 1] != 0.0) return true;
    return false;
  }
};

}  // namespace opgrowth
