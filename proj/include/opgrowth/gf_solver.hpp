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

#include "opgrowth/corrections.hpp"
#include "opgrowth/lo_solution.hpp"
#include "opgrowth/model.hpp"
#include "opgrowth/series.hpp"

namespace opgrowth {

/// How the t * O1 Lambda1 term of the second-order assembly is weighted.
enum class NnlVariant {
  consistent,     // t * O1 Lambda1: vanishes at t = 0 as required
  untimed_cross_term,  // O1 Lambda1 without the factor t; kept for comparison only
};

struct GfOptions {
  int precision = 0;  // series truncation K; 0 selects default_precision()
  NnlVariant variant = NnlVariant::consistent;
};

/// Truncation order large enough for the series to converge at x = 1 through fourth derivatives:
/// coefficients decay like q^n with q = 1 / radius, so require q^n n^4 < 1e-22, and at least 64
/// or 4 * display.
inline int default_precision(const ModelParams& params, int n_display = 0) {
  const LOSolution lo(params);
  int k = std::max(64, 4 * n_display);
  const double q = 1.0 / lo.radius();
  if (q > 0 && q < 1) {
    int n = 16;
    while (n < 2000 && n * std::log(q) + 4 * std::log(static_cast<double>(n)) > std::log(1e-22)) ++n;
    k = std::max(k, n + 8);
  }
  return k;
}

/// Generating-function pieces through second order at one time.
struct GfTerms {
  TruncatedSeries g0, g1, g2;
};

/// Order-by-order pieces G^(0), G^(1), G^(2) at time t (for order 0 only g0 is filled).
inline GfTerms gf_terms(const ModelParams& params, const WeightDistribution& b0, double t, int order,
                        const GfOptions& opt = {}) {
  if (order < 0 || order > 2) throw DomainError("gf: order must be 0, 1 or 2");
  if (t < 0) throw DomainError("gf: t must be >= 0");
  const int K = opt.precision > 0 ? opt.precision : default_precision(params);
  const int P = K + 24;  // guard digits for the Laurent coefficients and derivatives
  GfTerms out;
  if (order == 0) {
    out.g0 = gf_lo(params, b0, t, P).truncated(K);
    return out;
  }
  const auto pure = params.pure_interaction();
  if (!pure) throw UnsupportedError("corrections need pure two-body or pure three-body couplings");
  const PerturbativeSolution sol = build_correction_operators(*pure, params);
  const double ts = sol.strength * t;
  const LOSolution lo(ModelParams::pure(*pure == Interaction::two_body ? 2 : 3, params.N, sol.kappa, sol.r));
  const TruncatedSeries Ginit = initial_series(b0, P);
  const TruncatedSeries xt = lo.flow_series(ts, P);
  const TruncatedSeries F = compose(Ginit, xt);
  auto A = [&](const DiffOperator& op, const TruncatedSeries& s) { return sol.apply(op, s); };

  const TruncatedSeries H1 = A(sol.O1, Ginit);  // [O1 G_init](x)
  const TruncatedSeries H1t = compose(H1, xt);
  const TruncatedSeries L1F = A(sol.L1, F);
  out.g0 = F.truncated(K);
  out.g1 = (ts * L1F + A(sol.O1, F) - H1t).truncated(K);
  if (order == 1) return out;

  const TruncatedSeries H2t = compose(A(sol.O2, Ginit), xt);
  const TruncatedSeries H11t = compose(A(sol.O1, H1), xt);
  const double w = opt.variant == NnlVariant::consistent ? ts : 1.0;
  const TruncatedSeries g2 = ts * A(sol.L2, F) + (0.5 * ts * ts) * A(sol.L1, L1F) + A(sol.O2, F) +
                             w * A(sol.O1, L1F) - ts * A(sol.L1, H1t) - A(sol.O1, H1t) - H2t + H11t;
  out.g2 = g2.truncated(K);
  return out;
}

/// G^(0) + G^(1)/N + G^(2)/N^2 through the requested order.
inline TruncatedSeries gf_corrected(const ModelParams& params, const WeightDistribution& b0, double t, int order,
                                    const GfOptions& opt = {}) {
  const GfTerms g = gf_terms(params, b0, t, order, opt);
  const double h = 1.0 / params.N;
  TruncatedSeries out = g.g0;
  if (order >= 1) out = out + h * g.g1;
  if (order >= 2) out = out + (h * h) * g.g2;
  return out;
}

/// Leading-order late-time mean weight: 1/(1 - r_eff), or 2/(1 - r_eff) for three-body
/// couplings started in the even sector.
inline double plateau(const ModelParams& params, const WeightDistribution& b0) {
  return LOSolution(params).plateau(b0);
}

/// Coefficients b_w, w = 1..w_max, read off a generating function.
inline WeightDistribution distribution_from_series(const TruncatedSeries& g, int w_max) {
  std::vector<double> b(w_max, 0.0);
  for (int w = 1; w <= w_max && w < g.precision(); ++w) b[w - 1] = g[w];
  return WeightDistribution(std::move(b));
}

}  // namespace opgrowth
