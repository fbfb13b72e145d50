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

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "opgrowth/diff_operator.hpp"
#include "opgrowth/errors.hpp"
#include "opgrowth/model.hpp"
#include "opgrowth/series.hpp"

namespace opgrowth {

/// Dilute-limit solution for an arbitrary coupling set. With decay = a_sigma + kappa and
/// rho(x) = (r / decay) sum_n a_n x^n, the first eigenfunction obeys G1'/G1 = 1 / (x - rho(x)),
/// normalized to G1 = x + O(x^2); the k-th eigenfunction is G1^k with eigenvalue k * lambda1.
class LOSolution {
 public:
  explicit LOSolution(ModelParams params) : params_(std::move(params)) {
    params_.validate();
    decay_ = params_.a_sigma() + params_.kappa;
    if (!(decay_ > 0)) throw DomainError("LOSolution: a_sigma + kappa must be positive");
    lambda1_ = -2.0 * decay_;
    r_eff_ = params_.r * params_.a_sigma() / decay_;
    pure_ = params_.pure_interaction();
    for (const auto& c : params_.couplings) {
      if (c.a <= 0) continue;
      if (static_cast<int>(rho_.size()) <= c.n) rho_.resize(c.n + 1, 0.0);
      rho_[c.n] += params_.r * c.a / decay_;
    }
    radius_ = find_radius();
  }

  const ModelParams& params() const { return params_; }
  double lambda1() const { return lambda1_; }
  double lambda(int k) const { return k * lambda1_; }
  double r_eff() const { return r_eff_; }
  std::optional<Interaction> pure() const { return pure_; }
  /// r_eff >= 1: no normalizable late-time distribution.
  bool marginal() const { return r_eff_ >= 1.0; }
  /// Positive root of x = rho(x), the singularity of G1 (infinity when r = 0).
  double radius() const { return radius_; }

  /// Leading-order evolution operator A0 = (-2 decay x + 2 r sum_n a_n x^n) d/dx.
  DiffOperator a0() const {
    std::vector<double> c(std::max<std::size_t>(2, rho_.size()), 0.0);
    c[1] = -2.0 * decay_;
    for (std::size_t n = 2; n < rho_.size(); ++n) c[n] += 2.0 * decay_ * rho_[n];
    return DiffOperator::derivative(1, Polynomial(std::move(c)));
  }

  TruncatedSeries g1_series(int precision) const {
    if (pure_ == Interaction::two_body)
      return TruncatedSeries::monomial(1, 1.0, precision) /
             Polynomial{1.0, -r_eff_}.to_series(precision);
    if (pure_ == Interaction::three_body)
      return TruncatedSeries::monomial(1, 1.0, precision) *
             pow(Polynomial{1.0, 0.0, -r_eff_}.to_series(precision), -0.5);
    // G1 = x exp(int_0^x h), h = (u(s)/s) / (1 - u(s)), u(s) = rho(s)/s.
    std::vector<double> u(rho_.size(), 0.0), u_over_s(rho_.size(), 0.0);
    for (std::size_t n = 2; n < rho_.size(); ++n) u[n - 1] = rho_[n], u_over_s[n - 2] = rho_[n];
    const TruncatedSeries h = Polynomial(u_over_s).to_series(precision) /
                              (Polynomial::constant(1.0) - Polynomial(u)).to_series(precision);
    return TruncatedSeries::monomial(1, 1.0, precision) * exp(integral(h).truncated(precision - 1));
  }

  TruncatedSeries gk_series(int k, int precision) const {
    const TruncatedSeries g1 = g1_series(precision);
    TruncatedSeries g = g1;
    for (int i = 1; i < k; ++i) g = (g * g1).truncated(precision);
    return g;
  }

  /// Pointwise G1(x) for 0 <= x < radius.
  double g1(double x) const {
    check_domain(x);
    if (pure_ == Interaction::two_body) return x / (1.0 - r_eff_ * x);
    if (pure_ == Interaction::three_body) return x / std::sqrt(1.0 - r_eff_ * x * x);
    if (x == 0.0) return 0.0;
    auto h = [this](double s) {
      const double u = rho_value(s) / s;
      return (s == 0.0 ? 0.0 : u / s) / (1.0 - u);
    };
    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(h, 0.0, x, 15, 1e-13, &err);
    return x * std::exp(I);
  }

  /// Characteristic flow: G1(x_t) = exp(lambda1 t) G1(x), pointwise.
  double flow(double x, double t) const {
    const double theta = std::exp(lambda1_ * t);
    if (pure_ == Interaction::two_body) return x * theta / (1.0 - r_eff_ * x * (1.0 - theta));
    if (pure_ == Interaction::three_body)
      return x * theta / std::sqrt(1.0 + r_eff_ * x * x * (theta * theta - 1.0));
    const double target = theta * g1(x);
    double y = theta * x;  // x_t <= x and G1 is increasing, so Newton from below stays in the domain
    for (int it = 0; it < 100; ++it) {
      const double gy = g1(y);
      const double step = (gy - target) * (y - rho_value(y)) / gy;
      y -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(y))) return y;
    }
    throw ConvergenceError("LOSolution::flow: pointwise Newton did not converge");
  }

  /// Series of x_t in x.
  TruncatedSeries flow_series(double t, int precision) const {
    if (t < 0) throw DomainError("flow_series: t must be >= 0");
    const double theta = std::exp(lambda1_ * t);
    if (pure_ == Interaction::two_body)
      return TruncatedSeries::monomial(1, theta, precision) /
             Polynomial{1.0, -r_eff_ * (1.0 - theta)}.to_series(precision);
    if (pure_ == Interaction::three_body)
      return TruncatedSeries::monomial(1, theta, precision) *
             pow(Polynomial{1.0, 0.0, r_eff_ * (theta * theta - 1.0)}.to_series(precision), -0.5);
    // General couplings: the flow commutes with its generator, v(x) x_t'(x) = v(x_t) with
    // v(x) = -2 decay (x - rho(x)). Matching x^k gives a triangular recurrence seeded by theta;
    // unlike inverting G1 it involves no cancellation between growing terms.
    const int nmax = static_cast<int>(rho_.size()) - 1;
    std::vector<double> f(precision, 0.0);
    std::vector<std::vector<double>> pw(nmax + 1, std::vector<double>(precision, 0.0));  // pw[n][k] = [x_t^n]_k
    if (precision > 1) f[1] = pw[1][1] = theta;
    for (int k = 2; k < precision; ++k) {
      for (int n = 2; n <= std::min(nmax, k); ++n) {
        double acc = 0.0;
        for (int j = 1; j <= k - n + 1; ++j) acc += f[j] * pw[n - 1][k - j];
        pw[n][k] = acc;
      }
      double acc = 0.0;
      for (int n = 2; n <= std::min(nmax, k); ++n)
        if (rho_[n] != 0.0) acc += rho_[n] * ((k - n + 1) * f[k - n + 1] - pw[n][k]);
      f[k] = pw[1][k] = acc / (k - 1);
    }
    return TruncatedSeries(0, std::move(f));
  }

  /// Late-time mean weight at leading order, w_min / (1 - r_eff) for the lowest occupied sector.
  double plateau(const WeightDistribution& b0) const {
    if (marginal()) throw UnsupportedError("plateau: r_eff >= 1 has no late-time plateau");
    if (pure_ == Interaction::three_body && !b0.has_odd_support()) return 2.0 / (1.0 - r_eff_);
    return 1.0 / (1.0 - r_eff_);
  }

 private:
  double rho_value(double x) const {
    double acc = 0.0;
    for (std::size_t n = rho_.size(); n-- > 0;) acc = acc * x + rho_[n];
    return acc;
  }
  double find_radius() const {
    if (params_.r == 0.0) return std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = 1.0;
    while (hi - rho_value(hi) > 0) {
      lo = hi, hi *= 2;
      if (hi > 1e12) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid - rho_value(mid) > 0 ? lo : hi) = mid;
    }
    return lo;
  }
  void check_domain(double x) const {
    if (!(x >= 0.0 && x < radius_)) throw DomainError("LOSolution: x outside the domain of G1");
  }

  ModelParams params_;
  double decay_ = 1.0, lambda1_ = -2.0, r_eff_ = 0.0, radius_ = 0.0;
  std::optional<Interaction> pure_;
  std::vector<double> rho_;
};

inline LOSolution lo_solution(const ModelParams& params) { return LOSolution(params); }

/// Generating function sum_w b_w x^w of a distribution, at the given precision.
inline TruncatedSeries initial_series(const WeightDistribution& b0, int precision) {
  std::vector<double> c(std::max(precision - 1, 0), 0.0);
  for (int w = 1; w <= b0.w_max(); ++w) {
    if (b0.at(w) == 0.0) continue;
    if (w >= precision) throw DomainError("initial distribution has support beyond the series precision");
    c[w - 1] = b0.at(w);
  }
  return {1, std::move(c)};
}

/// Leading-order generating function G_init(x_t) at time t.
inline TruncatedSeries gf_lo(const ModelParams& params, const WeightDistribution& b0, double t, int precision) {
  const LOSolution lo(params);
  return compose(initial_series(b0, precision), lo.flow_series(t, precision));
}

}  // namespace opgrowth
