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
#include <initializer_list>
#include <vector>

#include "opgrowth/errors.hpp"
#include "opgrowth/series.hpp"

namespace opgrowth {

/// Dense polynomial with real coefficients, c[j] multiplying v^j. Used both in x and in k.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
  explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

  static Polynomial constant(double v) { return Polynomial{v}; }
  static Polynomial monomial(int power, double v = 1.0) {
    std::vector<double> c(power + 1, 0.0);
    c[power] = v;
    return Polynomial(std::move(c));
  }
  static Polynomial variable() { return monomial(1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  double operator[](int j) const { return (j >= 0 && j <= degree()) ? c_[j] : 0.0; }
  const std::vector<double>& coeffs() const { return c_; }

  double operator()(double v) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * v + c_[i];
    return acc;
  }

  TruncatedSeries to_series(int precision) const { return TruncatedSeries::polynomial(c_, precision); }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(double s, const Polynomial& a) {
    std::vector<double> c = a.c_;
    for (double& v : c) v *= s;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, double s) { return s * a; }
  friend Polynomial operator-(const Polynomial& a) { return -1.0 * a; }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0 * b); }
  friend Polynomial operator+(const Polynomial& a, double s) { return a + constant(s); }
  friend Polynomial operator+(double s, const Polynomial& a) { return a + constant(s); }
  friend Polynomial operator-(const Polynomial& a, double s) { return a + constant(-s); }
  friend Polynomial operator-(double s, const Polynomial& a) { return constant(s) - a; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  Polynomial pow(int e) const {
    if (e < 0) throw DomainError("Polynomial::pow: negative exponent");
    Polynomial out = constant(1.0);
    for (int i = 0; i < e; ++i) out = out * *this;
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

/// Ratio of two polynomials in x. The denominator may vanish at x = 0 only through a power of x,
/// which becomes a Laurent offset on expansion.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}
  RationalFunction(Polynomial num) : num_(std::move(num)), den_(Polynomial::constant(1.0)) {}  // NOLINT
  RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DomainError("RationalFunction: zero denominator");
  }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  double operator()(double x) const { return num_(x) / den_(x); }

  /// Laurent expansion about x = 0 through power precision-1.
  TruncatedSeries to_series(int precision) const {
    int m = 0;
    while (den_[m] == 0.0) ++m;
    std::vector<double> d(den_.coeffs().begin() + m, den_.coeffs().end());
    const int inner = precision + m;
    const TruncatedSeries q = num_.to_series(inner) / Polynomial(std::move(d)).to_series(inner);
    return q.shifted(-m).truncated(precision);
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RationalFunction operator*(double s, const RationalFunction& a) { return {s * a.num_, a.den_}; }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-1.0 * b);
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Builds rational functions over one shared denominator x^A D(x)^B, so that sums never
/// multiply denominators together.
class CommonDenominator {
 public:
  CommonDenominator(Polynomial D, int x_power, int d_power)
      : D_(std::move(D)), A_(x_power), B_(d_power),
        den_(Polynomial::monomial(x_power) * D_.pow(d_power)) {}

  /// num / (x^a D^b) rewritten over the shared denominator.
  RationalFunction term(const Polynomial& num, int a, int b) const {
    if (a > A_ || b > B_) throw DomainError("CommonDenominator: term exceeds the shared denominator");
    return {num * Polynomial::monomial(A_ - a) * D_.pow(B_ - b), den_};
  }

  RationalFunction zero() const { return {Polynomial{}, den_}; }

 private:
  Polynomial D_;
  int A_, B_;
  Polynomial den_;
};

}  // namespace opgrowth
