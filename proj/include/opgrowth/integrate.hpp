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

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "opgrowth/errors.hpp"
#include "opgrowth/generator.hpp"
#include "opgrowth/model.hpp"

namespace opgrowth {

struct EvolveOptions {
  double tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  long max_steps = 50'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Adaptive Dormand-Prince integration of db/dt = M b, reported on t_grid.
/// The linear invariant 1^T b is preserved to rounding whenever the columns of M sum to zero.
inline std::vector<WeightDistribution> evolve(const BandedGenerator& gen, const WeightDistribution& b0,
                                              std::span<const double> t_grid, const EvolveOptions& opt = {}) {
  using detail::DP45;
  const int n = gen.size();
  if (b0.w_max() != n) throw DomainError("evolve: initial distribution length must equal N");
  if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("evolve: time grid must start at 0");
  if (!(opt.tol > 0)) throw DomainError("evolve: tolerance must be positive");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("evolve: time grid must be increasing");

  std::vector<WeightDistribution> out;
  out.reserve(t_grid.size());
  out.push_back(b0);

  std::vector<double> y = b0.b, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
  double t = 0.0, h = opt.initial_step;
  long steps = 0;
  gen.apply(y, k1);
  auto stage = [&](std::initializer_list<std::pair<double, const std::vector<double>*>> terms, double hh,
                   std::vector<double>& dst) {
    for (int i = 0; i < n; ++i) {
      double acc = y[i];
      for (const auto& [c, k] : terms) acc += hh * c * (*k)[i];
      tmp[i] = acc;
    }
    gen.apply(tmp, dst);
  };

  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const double target = t_grid[gi];
    while (t < target) {
      if (++steps > opt.max_steps) throw IntegrationError("evolve: step budget exhausted", t);
      bool last = false;
      double hh = h;
      if (t + hh >= target) hh = target - t, last = true;
      stage({{DP45::a21, &k1}}, hh, k2);
      stage({{DP45::a31, &k1}, {DP45::a32, &k2}}, hh, k3);
      stage({{DP45::a41, &k1}, {DP45::a42, &k2}, {DP45::a43, &k3}}, hh, k4);
      stage({{DP45::a51, &k1}, {DP45::a52, &k2}, {DP45::a53, &k3}, {DP45::a54, &k4}}, hh, k5);
      stage({{DP45::a61, &k1}, {DP45::a62, &k2}, {DP45::a63, &k3}, {DP45::a64, &k4}, {DP45::a65, &k5}}, hh, k6);
      double ymax = 0.0;
      for (int i = 0; i < n; ++i) {
        ynew[i] = y[i] + hh * (DP45::b1 * k1[i] + DP45::b3 * k3[i] + DP45::b4 * k4[i] + DP45::b5 * k5[i] +
                               DP45::b6 * k6[i]);
        ymax = std::max({ymax, std::abs(y[i]), std::abs(ynew[i])});
      }
      gen.apply(ynew, k7);
      // Mixed error norm: relative to each entry, with an absolute floor tied to the largest entry.
      double err = 0.0;
      const double floor = 1e-3 * ymax;
      for (int i = 0; i < n; ++i) {
        const double e = hh * (DP45::e1 * k1[i] + DP45::e3 * k3[i] + DP45::e4 * k4[i] + DP45::e5 * k5[i] +
                               DP45::e6 * k6[i] + DP45::e7 * k7[i]);
        const double scale = opt.tol * (std::max(std::abs(y[i]), std::abs(ynew[i])) + floor);
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err)) throw IntegrationError("evolve: non-finite state", t);
      if (err <= 1.0) {
        t = last ? target : t + hh;
        y.swap(ynew);
        k1.swap(k7);
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!last || err > 1.0) h = hh * factor;
      if (h < opt.min_step) throw IntegrationError("evolve: step size underflow", t);
    }
    out.emplace_back(y);
  }
  return out;
}

/// b(t) = exp(M t) b0 by scaling and squaring on the dense matrix; intended for late-time plateaus.
inline WeightDistribution evolve_expm(const BandedGenerator& gen, const WeightDistribution& b0, double t) {
  if (b0.w_max() != gen.size()) throw DomainError("evolve_expm: length mismatch");
  const Eigen::MatrixXd E = (gen.dense() * t).exp();
  const Eigen::VectorXd v = E * Eigen::Map<const Eigen::VectorXd>(b0.b.data(), gen.size());
  if (!v.allFinite()) throw NumericalError("evolve_expm: non-finite result");
  return WeightDistribution(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace opgrowth
