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

#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "opgrowth/combinatorics.hpp"
#include "opgrowth/model.hpp"

namespace opgrowth {

/// Transition matrix of the weight master equation, db_w/dt = sum_w' M(w, w') b_w',
/// stored by diagonal. Indices are physical weights 1..N.
class BandedGenerator {
 public:
  BandedGenerator(int N, int half_width)
      : N_(N), s_(half_width), diags_(2 * half_width + 1, std::vector<double>(N, 0.0)) {
    if (N < 1 || half_width < 0) throw DomainError("BandedGenerator: bad shape");
  }

  int size() const { return N_; }
  int half_width() const { return s_; }

  /// Entry M(w, wp); zero outside the band.
  double operator()(int w, int wp) const {
    const int d = w - wp;
    if (d < -s_ || d > s_ || w < 1 || w > N_ || wp < 1 || wp > N_) return 0.0;
    return diags_[d + s_][wp - 1];
  }

  void add(int w, int wp, double value) {
    const int d = w - wp;
    if (d < -s_ || d > s_) throw DomainError("BandedGenerator: entry outside band");
    if (w < 1 || w > N_ || wp < 1 || wp > N_) throw DomainError("BandedGenerator: index out of range");
    diags_[d + s_][wp - 1] += value;
  }

  /// out = M * in.
  void apply(std::span<const double> in, std::span<double> out) const {
    for (int w = 1; w <= N_; ++w) {
      double acc = 0.0;
      const int lo = std::max(1, w - s_), hi = std::min(N_, w + s_);
      for (int wp = lo; wp <= hi; ++wp) acc += diags_[w - wp + s_][wp - 1] * in[wp - 1];
      out[w - 1] = acc;
    }
  }

  double column_sum(int wp) const {
    double s = 0.0;
    for (int w = std::max(1, wp - s_); w <= std::min(N_, wp + s_); ++w) s += (*this)(w, wp);
    return s;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N_, N_);
    for (int wp = 1; wp <= N_; ++wp)
      for (int w = std::max(1, wp - s_); w <= std::min(N_, wp + s_); ++w) M(w - 1, wp - 1) = (*this)(w, wp);
    return M;
  }

  /// (row, col, value) triples of all nonzero entries.
  void write_csv(std::ostream& os) const {
    os << "row,col,value\n";
    os.precision(17);
    for (int w = 1; w <= N_; ++w)
      for (int wp = std::max(1, w - s_); wp <= std::min(N_, w + s_); ++wp)
        if (double v = (*this)(w, wp); v != 0.0) os << w << ',' << wp << ',' << v << '\n';
  }

 private:
  int N_;
  int s_;
  std::vector<std::vector<double>> diags_;
};

/// Generator assembled from overlap counting for an arbitrary coupling set.
inline BandedGenerator build_generator(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  const int L = std::max(2, params.max_body());
  BandedGenerator M(N, L - 1);
  for (const auto& c : params.couplings) {
    if (c.a == 0.0) continue;
    const int n = c.n;
    const double rate = 4.0 * coupling_variance(n, c.a, N);
    for (int wp = 1; wp <= N; ++wp) {
      BigInt lost = 0;
      for (int p = 1; p <= n; p += 2) {
        for (int m = 0; p + m <= n; ++m) {
          const BigInt count = pattern_count({n, p, m, wp, N});
          if (count == 0) continue;
          lost += count;
          const int w = wp + n - 2 * m - p;  // in [1, N] whenever count != 0
          M.add(w, wp, rate * params.r * to_double(count));
        }
      }
      M.add(wp, wp, -rate * to_double(lost));
    }
  }
  for (int w = 1; w <= N; ++w) M.add(w, w, -2.0 * params.kappa * w);
  return M;
}

/// Hand-coded generators for pure two-body and pure three-body couplings, used for cross-checks.
inline BandedGenerator build_reference_generator(const ModelParams& params, Interaction which) {
  params.validate();
  if (params.pure_interaction() != which)
    throw DomainError(std::string("reference generator: couplings are not pure ") + to_string(which));
  const int N = params.N;
  const double a = params.strength(which == Interaction::two_body ? 2 : 3);
  // Time is measured in units where a = 1; M(a, kappa) = a M(1, kappa / a).
  const double k = params.kappa / a, r = params.r, Nd = N;
  if (which == Interaction::two_body) {
    BandedGenerator M(N, 1);
    for (int w = 1; w <= N; ++w) {
      const double wd = w;
      M.add(w, w, a * (-2.0 * wd * ((wd - 1) + 3 * (Nd - wd)) / (3 * Nd) - 2 * wd * k));
      if (w > 1) M.add(w, w - 1, a * r * 2 * (Nd - wd + 1) * (wd - 1) / Nd);
      if (w < N) M.add(w, w + 1, a * r * 2 * wd * (wd + 1) / (3 * Nd));
    }
    return M;
  }
  BandedGenerator M(N, 2);
  for (int w = 1; w <= N; ++w) {
    const double wd = w;
    M.add(w, w,
          a * (-2 * (k + 1) * wd + (2.0 / 3) * wd * (2 * r * (wd - 1) + 4 * wd + 5) / Nd -
               (4.0 / 27) * wd * (r * (7 * wd * wd - 3 * wd - 4) + 8 * wd * wd + 12 * wd + 7) / (Nd * Nd)));
    if (w > 2)
      M.add(w, w - 2,
            a * (2 * r * (wd - 2) - 2 * r * (2 * wd * wd - 7 * wd + 6) / Nd +
                 2 * r * (wd - 1) * (wd - 2) * (wd - 2) / (Nd * Nd)));
    if (w + 2 <= N) M.add(w, w + 2, a * (2.0 / 9) * r * wd * (wd * wd + 3 * wd + 2) / (Nd * Nd));
  }
  return M;
}

/// Leading-order (dilute-limit) generator truncated at w_max; lower triangular.
inline BandedGenerator build_lo_generator(const ModelParams& params, int w_max) {
  params.validate();
  const int L = std::max(2, params.max_body());
  BandedGenerator M(w_max, L - 1);
  const double decay = params.a_sigma() + params.kappa;
  for (int w = 1; w <= w_max; ++w) {
    M.add(w, w, -2.0 * w * decay);
    for (const auto& c : params.couplings) {
      const int src = w - (c.n - 1);
      if (c.a > 0 && src >= 1) M.add(w, src, 2.0 * params.r * c.a * src);
    }
  }
  return M;
}

}  // namespace opgrowth
