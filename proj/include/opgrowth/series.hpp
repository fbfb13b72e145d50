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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "opgrowth/errors.hpp"

namespace opgrowth {

/// Laurent/Taylor series sum_{p >= offset} c_p x^p known exactly below its precision:
/// coefficients of x^offset .. x^(precision-1) are stored, higher powers are unknown.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(int offset, std::vector<double> coeffs) : offset_(offset), c_(std::move(coeffs)) {}

  static TruncatedSeries zero(int precision) { return {0, std::vector<double>(std::max(precision, 0), 0.0)}; }

  static TruncatedSeries monomial(int power, double value, int precision) {
    if (power >= precision) return zero(precision);
    std::vector<double> c(precision - power, 0.0);
    c[0] = value;
    return {power, std::move(c)};
  }

  /// Polynomial with c[j] the coefficient of x^j, viewed at the given precision.
  static TruncatedSeries polynomial(std::span<const double> c, int precision) {
    std::vector<double> v(std::max(precision, 0), 0.0);
    for (std::size_t j = 0; j < c.size() && static_cast<int>(j) < precision; ++j) v[j] = c[j];
    return {0, std::move(v)};
  }

  int offset() const { return offset_; }
  int precision() const { return offset_ + static_cast<int>(c_.size()); }
  std::span<const double> coeffs() const { return c_; }

  /// Coefficient of x^p; zero below the offset, error at or beyond the precision.
  double operator[](int p) const {
    if (p < offset_) return 0.0;
    if (p >= precision())
      throw DomainError("series coefficient x^" + std::to_string(p) + " lies beyond precision " +
                        std::to_string(precision()));
    return c_[p - offset_];
  }

  /// First power with a nonzero coefficient, or the precision if all known coefficients vanish.
  int valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0.0) return offset_ + static_cast<int>(i);
    return precision();
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Same series with the known window cut at `prec` (never extends it).
  TruncatedSeries truncated(int prec) const {
    prec = std::min(prec, precision());
    if (prec <= offset_) return {prec, {}};
    return {offset_, std::vector<double>(c_.begin(), c_.begin() + (prec - offset_))};
  }

  /// Drop the stored coefficients below `new_offset` (caller guarantees they are negligible).
  TruncatedSeries dropped_below(int new_offset) const {
    if (new_offset <= offset_) return *this;
    if (new_offset >= precision()) return {precision(), {}};
    return {new_offset, std::vector<double>(c_.begin() + (new_offset - offset_), c_.end())};
  }

  /// Multiply by x^m.
  TruncatedSeries shifted(int m) const { return {offset_ + m, c_}; }

  /// Value at x using the stored window.
  double evaluate(double x) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc * std::pow(x, offset_);
  }

 private:
  int offset_ = 0;
  std::vector<double> c_;
};

inline TruncatedSeries operator*(double s, const TruncatedSeries& a) {
  std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
  for (double& v : c) v *= s;
  return {a.offset(), std::move(c)};
}
inline TruncatedSeries operator*(const TruncatedSeries& a, double s) { return s * a; }

inline TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int lo = std::min(a.offset(), b.offset());
  const int prec = std::min(a.precision(), b.precision());
  if (prec <= lo) return {prec, {}};
  std::vector<double> c(prec - lo, 0.0);
  for (int p = a.offset(); p < prec; ++p) c[p - lo] += a[p];
  for (int p = b.offset(); p < prec; ++p) c[p - lo] += b[p];
  return {lo, std::move(c)};
}
inline TruncatedSeries operator-(const TruncatedSeries& a) { return -1.0 * a; }
inline TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-1.0 * b); }

inline TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int va = a.valuation(), vb = b.valuation();
  const int prec = std::min(a.precision() + vb, b.precision() + va);
  const int lo = va + vb;
  if (prec <= lo) return {prec, {}};
  std::vector<double> c(prec - lo, 0.0);
  for (int i = va; i < a.precision() && i + vb < prec; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (int j = vb; j < b.precision() && i + j < prec; ++j) c[i + j - lo] += ai * b[j];
  }
  return {lo, std::move(c)};
}

/// a / b; the leading known coefficient of b must be nonzero.
inline TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int vb = b.valuation();
  if (vb >= b.precision()) throw DomainError("series division by a series with zero leading coefficient");
  const int va = a.valuation();
  const int rel = std::min(a.precision() - va, b.precision() - vb);
  const int lo = va - vb;
  if (rel <= 0) return {lo + std::max(rel, 0), {}};
  std::vector<double> q(rel, 0.0);
  const double b0 = b[vb];
  for (int n = 0; n < rel; ++n) {
    double acc = a[va + n];
    for (int j = 1; j <= n; ++j) acc -= b[vb + j] * q[n - j];
    q[n] = acc / b0;
  }
  return {lo, std::move(q)};
}

inline TruncatedSeries derivative(const TruncatedSeries& a, int order = 1) {
  TruncatedSeries out = a;
  for (int k = 0; k < order; ++k) {
    std::vector<double> c(out.coeffs().size(), 0.0);
    for (int p = out.offset(); p < out.precision(); ++p) c[p - out.offset()] = p * out[p];
    out = TruncatedSeries(out.offset() - 1, std::move(c)).truncated(out.precision() - 1);
  }
  return out;
}

/// Antiderivative with zero constant term; requires no x^-1 term.
inline TruncatedSeries integral(const TruncatedSeries& a) {
  std::vector<double> c(a.coeffs().size(), 0.0);
  for (int p = a.offset(); p < a.precision(); ++p) {
    if (p == -1) {
      if (a[p] != 0.0) throw DomainError("integral: series has an x^-1 term");
      continue;
    }
    c[p - a.offset()] = a[p] / (p + 1);
  }
  return {a.offset() + 1, std::move(c)};
}

/// s^alpha for a Taylor series with positive constant term (J.C.P. Miller recurrence).
inline TruncatedSeries pow(const TruncatedSeries& s, double alpha) {
  if (s.valuation() != 0 || s[0] <= 0.0 || s.offset() < 0)
    throw DomainError("series pow: requires a positive constant term and no negative powers");
  const int P = s.precision();
  std::vector<double> y(P, 0.0);
  y[0] = std::pow(s[0], alpha);
  for (int n = 1; n < P; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += (alpha * k - (n - k)) * s[k] * y[n - k];
    y[n] = acc / (n * s[0]);
  }
  return {0, std::move(y)};
}

inline TruncatedSeries exp(const TruncatedSeries& s) {
  if (s.offset() < 0 && s.valuation() < 0) throw DomainError("series exp: negative powers");
  const int P = s.precision();
  std::vector<double> y(std::max(P, 0), 0.0);
  if (P <= 0) return {0, y};
  y[0] = std::exp(s[0]);
  for (int n = 1; n < P; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += k * s[k] * y[n - k];
    y[n] = acc / n;
  }
  return {0, std::move(y)};
}

/// f(g(x)); g must vanish at 0 and f must be free of negative powers.
inline TruncatedSeries compose(const TruncatedSeries& f, const TruncatedSeries& g) {
  const int vg = g.valuation();
  if (vg < 1) throw DomainError("compose: inner series must vanish at x = 0");
  if (f.valuation() < 0) throw DomainError("compose: outer series has negative powers");
  const int pf = f.precision();
  int prec = pf * vg;
  for (int j = std::max(1, f.offset()); j < pf; ++j)
    if (f[j] != 0.0) {
      prec = std::min(prec, g.precision() + (j - 1) * vg);
      break;
    }
  prec = std::max(prec, 0);
  const TruncatedSeries gt = g.truncated(prec);
  TruncatedSeries acc = TruncatedSeries::zero(prec);
  for (int j = pf - 1; j >= 0; --j) {
    acc = (acc * gt).truncated(prec) + TruncatedSeries::monomial(0, f[j], prec);
  }
  return acc.truncated(prec);
}

/// Solve G1(x_t) = theta * G1(x) for the series x_t by Newton iteration, starting from theta * x.
inline TruncatedSeries invert_flow(const TruncatedSeries& G1, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("invert_flow: theta must lie in (0, 1]");
  if (G1.valuation() != 1) throw DomainError("invert_flow: G1 needs a nonzero linear coefficient");
  const int P = G1.precision();
  const TruncatedSeries target = theta * G1;
  const TruncatedSeries dG1 = derivative(G1);
  const double scale = std::max(1.0, target.max_abs());
  TruncatedSeries y = TruncatedSeries::monomial(1, theta / G1[1], P);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 64; ++it) {
    const TruncatedSeries R = (compose(G1, y) - target).truncated(P);
    const double res = R.max_abs();
    if (res <= 1e-14 * scale || (res <= 1e-12 * scale && res >= 0.5 * residual)) return y;
    residual = res;
    y = (y - R / compose(dG1, y)).truncated(P);
  }
  if (residual <= 1e-12 * scale) return y;
  throw ConvergenceError("invert_flow: Newton iteration stagnated, residual " + std::to_string(residual));
}

/// Coefficient contraction sum_m w_m g_m over the common window.
inline double biorthogonal_pairing(const TruncatedSeries& W, const TruncatedSeries& G) {
  const int lo = std::max(W.offset(), G.offset());
  const int hi = std::min(W.precision(), G.precision());
  double acc = 0.0;
  for (int p = lo; p < hi; ++p) acc += W[p] * G[p];
  return acc;
}

/// Taylor data of a function at a point; holds f^(j)(x0)/j! for j = 0..J.
class Jet {
 public:
  Jet(double x0, std::vector<double> taylor) : x0_(x0), t_(std::move(taylor)) {}

  static Jet constant(double x0, double v, int J) {
    std::vector<double> t(J + 1, 0.0);
    t[0] = v;
    return {x0, std::move(t)};
  }
  static Jet variable(double x0, int J) {
    std::vector<double> t(J + 1, 0.0);
    t[0] = x0;
    if (J >= 1) t[1] = 1.0;
    return {x0, std::move(t)};
  }

  double point() const { return x0_; }
  int order() const { return static_cast<int>(t_.size()) - 1; }
  double value() const { return t_[0]; }
  double taylor(int j) const { return t_.at(j); }
  /// j-th derivative at the base point.
  double derivative(int j) const {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return t_.at(j) * f;
  }
  std::vector<double> derivatives() const {
    std::vector<double> d(t_.size());
    for (int j = 0; j <= order(); ++j) d[j] = derivative(j);
    return d;
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return a.zip(b, [](double u, double v) { return u + v; }); }
  friend Jet operator-(const Jet& a, const Jet& b) { return a.zip(b, [](double u, double v) { return u - v; }); }
  friend Jet operator*(double s, const Jet& a) {
    Jet out = a;
    for (double& v : out.t_) v *= s;
    return out;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    const int J = std::min(a.order(), b.order());
    std::vector<double> t(J + 1, 0.0);
    for (int i = 0; i <= J; ++i)
      for (int j = 0; i + j <= J; ++j) t[i + j] += a.t_[i] * b.t_[j];
    return {a.x0_, std::move(t)};
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.t_[0] == 0.0) throw DomainError("jet division by zero value");
    const int J = std::min(a.order(), b.order());
    std::vector<double> q(J + 1, 0.0);
    for (int n = 0; n <= J; ++n) {
      double acc = a.t_[n];
      for (int j = 1; j <= n; ++j) acc -= b.t_[j] * q[n - j];
      q[n] = acc / b.t_[0];
    }
    return {a.x0_, std::move(q)};
  }

 private:
  template <class F>
  Jet zip(const Jet& b, F f) const {
    if (x0_ != b.x0_) throw DomainError("jets at different base points");
    const int J = std::min(order(), b.order());
    std::vector<double> t(J + 1);
    for (int j = 0; j <= J; ++j) t[j] = f(t_[j], b.t_[j]);
    return {x0_, std::move(t)};
  }

  double x0_;
  std::vector<double> t_;
};

/// Taylor data of a series at x0 through order J. The stored window must have converged there:
/// the largest contribution from the last quarter of coefficients has to be negligible.
inline Jet jet_eval(const TruncatedSeries& s, double x0, int J, double tail_tol = 1e-13) {
  if (J < 0) throw DomainError("jet_eval: negative order");
  if (x0 == 0.0 && s.valuation() < 0) throw DomainError("jet_eval: pole at the base point");
  std::vector<double> t(J + 1, 0.0);
  double total = 0.0, tail = 0.0;
  const int lo = s.offset(), hi = s.precision();
  const int tail_start = hi - std::max(1, (hi - std::max(lo, 0)) / 4);
  for (int p = lo; p < hi; ++p) {
    const double c = s[p];
    if (c == 0.0) continue;
    // Contribution of c x^p to f^(j)/j!: c * binom(p, j) * x0^(p-j).
    double mag = 0.0;
    double b = 1.0;  // binom(p, j), generalized to negative p
    for (int j = 0; j <= J; ++j) {
      if (j > 0) b *= static_cast<double>(p - j + 1) / j;
      if (b == 0.0) break;
      const double term = c * b * std::pow(x0, p - j);
      t[j] += term;
      mag = std::max(mag, std::abs(term));
    }
    total = std::max(total, mag);
    if (p >= tail_start) tail = std::max(tail, mag);
  }
  if (!(tail <= tail_tol * std::max(total, 1e-300)) && tail > 0.0)
    throw ConvergenceError("jet_eval: series window has not converged at x0 = " + std::to_string(x0) +
                           " (tail/peak = " + std::to_string(tail / total) + ")");
  return {x0, std::move(t)};
}

}  // namespace opgrowth
