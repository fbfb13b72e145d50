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
#include <string>
#include <vector>

#include "opgrowth/errors.hpp"
#include "opgrowth/rational.hpp"
#include "opgrowth/series.hpp"

namespace opgrowth {

/// coeff(x) * d^order/dx^order
struct DerivTerm {
  RationalFunction coeff;
  int order = 0;
};

/// coeff(x) * (A0 / lambda1)^power, where A0 is the leading-order evolution operator.
struct FlowTerm {
  RationalFunction coeff;
  int power = 0;
};

/// Linear differential operator with rational coefficients, optionally containing powers of
/// the normalized leading-order generator A0 / lambda1 (which acts as k on the k-th eigenfunction).
class DiffOperator {
 public:
  DiffOperator() = default;

  static DiffOperator identity() { return derivative(0); }
  static DiffOperator derivative(int order, RationalFunction coeff = Polynomial::constant(1.0)) {
    DiffOperator op;
    op.add(std::move(coeff), order);
    return op;
  }

  DiffOperator& add(RationalFunction coeff, int order) {
    if (order < 0) throw DomainError("DiffOperator: negative derivative order");
    derivs_.push_back({std::move(coeff), order});
    return *this;
  }
  DiffOperator& add_flow(RationalFunction coeff, int power) {
    if (power < 0) throw DomainError("DiffOperator: negative flow power");
    flows_.push_back({std::move(coeff), power});
    return *this;
  }

  const std::vector<DerivTerm>& deriv_terms() const { return derivs_; }
  const std::vector<FlowTerm>& flow_terms() const { return flows_; }
  bool empty() const { return derivs_.empty() && flows_.empty(); }
  int max_derivative() const {
    int m = 0;
    for (const auto& t : derivs_) m = std::max(m, t.order);
    return m;
  }

  friend DiffOperator operator+(DiffOperator a, const DiffOperator& b) {
    a.derivs_.insert(a.derivs_.end(), b.derivs_.begin(), b.derivs_.end());
    a.flows_.insert(a.flows_.end(), b.flows_.begin(), b.flows_.end());
    return a;
  }
  friend DiffOperator operator*(double s, DiffOperator a) {
    for (auto& t : a.derivs_) t.coeff = s * t.coeff;
    for (auto& t : a.flows_) t.coeff = s * t.coeff;
    return a;
  }

 private:
  std::vector<DerivTerm> derivs_;
  std::vector<FlowTerm> flows_;
};

/// Guard for generating functions, which carry no x^j with j <= 0: such coefficients must be
/// rounding noise, and are removed.
inline TruncatedSeries enforce_physical(const TruncatedSeries& s, double scale, const char* where) {
  for (int p = s.offset(); p <= 0 && p < s.precision(); ++p)
    if (std::abs(s[p]) > 1e-10 * std::max(1.0, scale))
      throw ConsistencyError(std::string(where) + ": coefficient of x^" + std::to_string(p) + " is " +
                             std::to_string(s[p]) + ", expected 0");
  return s.dropped_below(1);
}

/// Applies op to s. Flow terms use a0 (which must be a pure derivative operator) and lambda1.
/// With physical = true the result is checked and stripped of nonpositive powers.
inline TruncatedSeries apply_operator(const DiffOperator& op, const TruncatedSeries& s, const DiffOperator* a0 = nullptr,
                                      double lambda1 = 1.0, bool physical = false) {
  const int margin = 8;
  const int cprec = s.precision() + margin;
  TruncatedSeries out = TruncatedSeries::zero(s.precision() + margin);
  bool any = false;
  auto accumulate = [&](const TruncatedSeries& term) {
    out = any ? out + term : term;
    any = true;
  };
  for (const auto& t : op.deriv_terms()) {
    if (t.coeff.is_zero()) continue;
    accumulate(t.coeff.to_series(cprec) * derivative(s, t.order));
  }
  if (!op.flow_terms().empty()) {
    if (a0 == nullptr || !a0->flow_terms().empty())
      throw DomainError("apply_operator: flow terms need a pure derivative operator A0");
    if (lambda1 == 0.0) throw DomainError("apply_operator: lambda1 must be nonzero");
    int max_power = 0;
    for (const auto& t : op.flow_terms()) max_power = std::max(max_power, t.power);
    std::vector<TruncatedSeries> powers{s};
    for (int p = 1; p <= max_power; ++p)
      powers.push_back((1.0 / lambda1) * apply_operator(*a0, powers.back()));
    for (const auto& t : op.flow_terms()) {
      if (t.coeff.is_zero()) continue;
      accumulate(t.coeff.to_series(cprec) * powers[t.power]);
    }
  }
  if (!any) return TruncatedSeries::zero(s.precision());
  return physical ? enforce_physical(out, s.max_abs(), "apply_operator") : out;
}

/// sum_j q_j(x) k^j
class KPolynomial {
 public:
  KPolynomial() = default;
  explicit KPolynomial(std::vector<RationalFunction> q) : q_(std::move(q)) {
    if (q_.size() > 5) throw DomainError("KPolynomial: degree above 4 is out of scope");
  }

  /// c(k) * f(x) for a constant-coefficient polynomial c in k.
  static KPolynomial separable(const Polynomial& c, const RationalFunction& f) {
    std::vector<RationalFunction> q;
    for (int j = 0; j <= c.degree(); ++j) q.push_back(c[j] * f);
    return KPolynomial(std::move(q));
  }

  int degree() const { return static_cast<int>(q_.size()) - 1; }
  const std::vector<RationalFunction>& coeffs() const { return q_; }
  const RationalFunction& operator[](int j) const { return q_.at(j); }

  /// Value at (x, k).
  double operator()(double x, double k) const {
    double acc = 0.0, kp = 1.0;
    for (const auto& q : q_) acc += q(x) * kp, kp *= k;
    return acc;
  }

  /// sum_j q_j(x) k^j as a rational function of x for a fixed k.
  RationalFunction at_k(double k) const {
    RationalFunction acc;
    double kp = 1.0;
    bool first = true;
    for (const auto& q : q_) {
      acc = first ? kp * q : acc + kp * q;
      first = false;
      kp *= k;
    }
    return acc;
  }

  friend KPolynomial operator+(const KPolynomial& a, const KPolynomial& b) {
    std::vector<RationalFunction> q;
    const std::size_t n = std::max(a.q_.size(), b.q_.size());
    for (std::size_t j = 0; j < n; ++j) {
      if (j < a.q_.size() && j < b.q_.size())
        q.push_back(a.q_[j] + b.q_[j]);
      else
        q.push_back(j < a.q_.size() ? a.q_[j] : b.q_[j]);
    }
    return KPolynomial(std::move(q));
  }
  friend KPolynomial operator*(double s, const KPolynomial& a) {
    std::vector<RationalFunction> q;
    for (const auto& f : a.q_) q.push_back(s * f);
    return KPolynomial(std::move(q));
  }

 private:
  std::vector<RationalFunction> q_;
};

/// Operator sum_j q_j(x) (A0/lambda1)^j, which reproduces sum_j q_j(x) k^j on the k-th eigenfunction.
inline DiffOperator kpoly_to_operator(const KPolynomial& q) {
  DiffOperator op;
  for (int j = 0; j <= q.degree(); ++j)
    if (!q[j].is_zero()) op.add_flow(q[j], j);
  return op;
}

}  // namespace opgrowth
