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

#include <array>
#include <cmath>
#include <vector>

#include "opgrowth/errors.hpp"
#include "opgrowth/model.hpp"
#include "opgrowth/rational.hpp"
#include "opgrowth/series.hpp"

namespace opgrowth {

/// Scrambling observables at one time. The ratio uses the norm sum_w b_w (echo / 4) as its
/// denominator, so that for a weight-1 probe it equals (8 / 3N) <w>.
struct ObservableSet {
  double t = 0.0;
  double norm = 0.0;
  double mean_w = 0.0;
  double echo = 0.0;
  std::array<double, 3> otoc{};
  std::array<double, 3> rotoc{};
};

inline WeightDistribution normalize(const WeightDistribution& b) {
  const double s = b.total();
  if (!(s > 0)) throw DomainError("normalize: distribution has zero norm");
  std::vector<double> c = b.b;
  for (double& v : c) v /= s;
  return WeightDistribution(std::move(c));
}

inline double echo(const WeightDistribution& b) { return 4.0 * b.total(); }

/// Weight of b_w in the dressed OTOC for a probe of weight v, as a polynomial in w.
inline Polynomial otoc_weight_polynomial(int v, int N) {
  const double n = N;
  const Polynomial w = Polynomial::variable();
  switch (v) {
    case 1:
      return (8.0 / (3 * n)) * w;
    case 2:
      return (16.0 / (9 * (n - 1) * n)) * (w * (3 * n - 1 - 2.0 * w));
    case 3:
      if (N < 3) throw DomainError("dressed_otoc: weight-3 probe needs N >= 3");
      // 4 C_w / N_w counted over all anticommuting overlaps, including three clashing sites.
      return (8.0 / (27 * (n - 2) * (n - 1) * n)) *
             (w * (27 * n * n - 45 * n + 14 + (24 - 36 * n) * w + 16.0 * w * w));
    default:
      throw DomainError("dressed_otoc: probe weight must be 1, 2 or 3");
  }
}

inline double dressed_otoc(const WeightDistribution& b, int v, int N) {
  const Polynomial p = otoc_weight_polynomial(v, N);
  double acc = 0.0;
  for (int w = 1; w <= b.w_max(); ++w) acc += p(w) * b.at(w);
  return acc;
}

inline double rotoc(const WeightDistribution& b, int v, int N) {
  const double s = b.total();
  if (!(s > 0)) throw DomainError("rotoc: zero echo");
  return dressed_otoc(b, v, N) / s;
}

/// <w^p>_c
inline double moment(const WeightDistribution& b, int p) {
  const double s = b.total();
  if (!(s > 0)) throw DomainError("moment: zero norm");
  double acc = 0.0;
  for (int w = 1; w <= b.w_max(); ++w) acc += std::pow(static_cast<double>(w), p) * b.at(w);
  return acc / s;
}

/// Raw moments sum_w w^p b_w, p = 0..J, from the Taylor data of G at x = 1, using
/// (x d/dx)^p = sum_i S(p, i) x^i d^i with Stirling numbers of the second kind.
inline std::vector<double> raw_moments(const Jet& j) {
  if (j.point() != 1.0) throw DomainError("raw_moments: jet must be taken at x = 1");
  const int J = j.order();
  std::vector<std::vector<double>> S(J + 1, std::vector<double>(J + 1, 0.0));
  S[0][0] = 1.0;
  for (int p = 1; p <= J; ++p)
    for (int i = 1; i <= p; ++i) S[p][i] = i * S[p - 1][i] + S[p - 1][i - 1];
  std::vector<double> m(J + 1, 0.0);
  for (int p = 0; p <= J; ++p)
    for (int i = 0; i <= p; ++i) m[p] += S[p][i] * j.derivative(i);
  return m;
}

/// <w^p>_c from a generating function, via its jet at x = 1.
inline double moment(const TruncatedSeries& g, int p, int J = -1) {
  if (J < 0) J = std::max(p, 1);
  if (p > J) throw DomainError("moment: jet order too small for the requested moment");
  const std::vector<double> m = raw_moments(jet_eval(g, 1.0, J));
  if (!(m[0] > 0)) throw DomainError("moment: zero norm");
  return m[p] / m[0];
}

namespace detail {

inline ObservableSet observables_from_moments(std::span<const double> m, int N, double t) {
  ObservableSet o;
  o.t = t;
  o.norm = m[0];
  o.echo = 4.0 * m[0];
  o.mean_w = m[0] > 0 ? m[1] / m[0] : 0.0;
  for (int v = 1; v <= 3; ++v) {
    if (v == 3 && N < 3) {
      o.otoc[2] = o.rotoc[2] = std::nan("");
      continue;
    }
    const Polynomial p = otoc_weight_polynomial(v, N);
    double acc = 0.0;
    for (int j = 0; j <= p.degree(); ++j) acc += p[j] * m[j];
    o.otoc[v - 1] = acc;
    o.rotoc[v - 1] = m[0] > 0 ? acc / m[0] : std::nan("");
  }
  return o;
}

}  // namespace detail

inline ObservableSet observables(const WeightDistribution& b, int N, double t) {
  std::array<double, 4> m{};
  for (int w = 1; w <= b.w_max(); ++w) {
    double wp = 1.0;
    for (double& mj : m) mj += wp * b.at(w), wp *= w;
  }
  return detail::observables_from_moments(m, N, t);
}

inline ObservableSet observables(const TruncatedSeries& g, int N, double t) {
  return detail::observables_from_moments(raw_moments(jet_eval(g, 1.0, 3)), N, t);
}

}  // namespace opgrowth
