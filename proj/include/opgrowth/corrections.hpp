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

#include <string>
#include <vector>

#include "opgrowth/diff_operator.hpp"
#include "opgrowth/errors.hpp"
#include "opgrowth/lo_solution.hpp"
#include "opgrowth/model.hpp"
#include "opgrowth/rational.hpp"

// Closed-form 1/N corrections for pure two-body and pure three-body couplings. All formulas are
// written in units where the coupling strength is 1; a strength a maps onto these through
// kappa -> kappa / a, t -> a t and eigenvalues -> a * eigenvalues.

namespace opgrowth {

namespace detail {

/// Polynomial in (k, x): byk[j] is the x-polynomial multiplying k^j.
struct BiPoly {
  std::vector<Polynomial> byk;

  static BiPoly in_k(const Polynomial& p) {
    BiPoly b;
    for (int j = 0; j <= p.degree(); ++j) b.byk.push_back(Polynomial::constant(p[j]));
    return b;
  }
  static BiPoly in_x(const Polynomial& p) { return BiPoly{{p}}; }
  Polynomial operator[](std::size_t j) const { return j < byk.size() ? byk[j] : Polynomial{}; }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
    BiPoly c;
    for (std::size_t j = 0; j < std::max(a.byk.size(), b.byk.size()); ++j) c.byk.push_back(a[j] + b[j]);
    return c;
  }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    BiPoly c;
    if (a.byk.empty() || b.byk.empty()) return c;
    c.byk.assign(a.byk.size() + b.byk.size() - 1, Polynomial{});
    for (std::size_t i = 0; i < a.byk.size(); ++i)
      for (std::size_t j = 0; j < b.byk.size(); ++j) c.byk[i + j] = c.byk[i + j] + a.byk[i] * b.byk[j];
    return c;
  }
  friend BiPoly operator*(double s, const BiPoly& a) { return in_x(Polynomial::constant(s)) * a; }
  friend BiPoly operator*(const BiPoly& a, double s) { return s * a; }
  friend BiPoly operator+(const BiPoly& a, double s) { return a + in_x(Polynomial::constant(s)); }
  friend BiPoly operator+(double s, const BiPoly& a) { return a + s; }
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b) { return a + (-1.0) * b; }
  friend BiPoly operator-(const BiPoly& a, double s) { return a + (-s); }
  friend BiPoly operator-(double s, const BiPoly& a) { return (-1.0) * a + s; }
  friend BiPoly operator-(const BiPoly& a) { return (-1.0) * a; }
};

/// Sum of terms numerator(k, x) / (x^a D^b), collected over x^A D^B.
class KFractionSum {
 public:
  KFractionSum(Polynomial D, int A, int B) : cd_(std::move(D), A, B) {}

  KFractionSum& add(const BiPoly& num, int a, int b) {
    if (q_.size() < num.byk.size()) q_.resize(num.byk.size(), cd_.zero());
    for (std::size_t j = 0; j < num.byk.size(); ++j) q_[j] = q_[j] + cd_.term(num.byk[j], a, b);
    return *this;
  }

  KPolynomial result(double scale = 1.0) const {
    std::vector<RationalFunction> q;
    for (const auto& f : q_) q.push_back(scale * f);
    return KPolynomial(std::move(q));
  }

 private:
  CommonDenominator cd_;
  std::vector<RationalFunction> q_;
};

inline const BiPoly K = BiPoly::in_k(Polynomial{0.0, 1.0});
inline const BiPoly X = BiPoly::in_x(Polynomial{0.0, 1.0});

}  // namespace detail

/// Eigenvalue corrections lambda_k^(order) as polynomials in k (unit coupling strength).
inline Polynomial eigen_correction_poly(Interaction which, int order, double kappa, double r) {
  const double kp = kappa + 1, r2 = r * r;
  if (order != 1 && order != 2) throw DomainError("eigen_correction: order must be 1 or 2");
  if (which == Interaction::two_body) {
    if (order == 1)
      return Polynomial{0.0, 2 * (kappa - r2 + 1) / (3 * kp), 2 * (2 * kappa + 3 * r2 + 2) / (3 * kp)};
    const double s = 2 * r2 / (9 * kp * kp * kp);
    return s * Polynomial{0.0, -3 * kappa * kappa - 5 * kappa + 2 * r2 - 2,
                          9 * kappa * kappa + 15 * kappa - 6 * r2 + 6,
                          4 * (-3 * kappa * kappa - 2 * kappa + 3 * r2 + 1)};
  }
  if (order == 1) return Polynomial{0.0, (2.0 / 3) * (5 - 2 * r), (2.0 / 3) * (2 * r + 4)};
  const double s = 2.0 / (27 * kp);
  return s * Polynomial{0.0, -14 * kappa + 6 * r2 + 8 * kappa * r + 8 * r - 14,
                        -24 * kappa - 9 * r2 + 6 * kappa * r + 6 * r - 24,
                        -16 * kappa + 12 * r2 - 14 * kappa * r - 14 * r - 16};
}

/// lambda_k^(order) for the given model; a pure coupling of strength a rescales as described above.
inline double eigen_correction(Interaction which, int order, double k, const ModelParams& params) {
  const auto pure = params.pure_interaction();
  if (pure != which) throw UnsupportedError("eigen_correction: couplings are not pure " + std::string(to_string(which)));
  const double a = params.strength(which == Interaction::two_body ? 2 : 3);
  return a * eigen_correction_poly(which, order, params.kappa / a, params.r)(k);
}

/// First subleading evolution operators A1, A2 (unit coupling strength); A2 vanishes for two-body.
inline DiffOperator subleading_generator(Interaction which, int order, double kappa, double r) {
  (void)kappa;
  const Polynomial x = Polynomial::variable();
  DiffOperator op;
  if (which == Interaction::two_body) {
    if (order == 2) return op;
    op.add((2.0 / 3) * (3.0 * x - 3.0 * r * x.pow(2)), 1);
    op.add((2.0 / 3) * (-3.0 * r * x.pow(3) + r * x + 2.0 * x.pow(2)), 2);
    return op;
  }
  if (order == 1) {
    op.add(6.0 * x - 6.0 * r * x.pow(3), 1);
    op.add((4.0 / 3) * (r + 2) * x.pow(2) - 4.0 * r * x.pow(4), 2);
    return op;
  }
  op.add(-4.0 * x + 4.0 * r * x.pow(3), 1);
  op.add(-(4.0 / 27) * 18 * (r + 2) * x.pow(2) + 8.0 * r * x.pow(4), 2);
  op.add(-(4.0 / 27) * (7 * r + 8) * x.pow(3) + 2.0 * r * x.pow(5) + (2 * r / 9) * x, 3);
  return op;
}

/// G_k^(order)(x) / G_k^(0)(x) as a polynomial in k with rational coefficients in x
/// (unit coupling strength; first-order normalization constant set to zero).
inline KPolynomial eigenfunction_correction(Interaction which, int order, double kappa, double r) {
  using detail::BiPoly, detail::K, detail::X;
  if (order != 1 && order != 2) throw DomainError("eigenfunction_correction: order must be 1 or 2");
  const double kp = kappa + 1, r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
  if (which == Interaction::two_body) {
    const Polynomial D{kp, -r};
    if (order == 1) {
      const BiPoly br = 2 * (3 * K - 1) * r3 * X * X - 3 * kp * (3 * K - 1) * r2 * X +
                        2 * kp * r * (-kappa + K * (kappa + 2 * X * X + 1) + (3 * kappa + 4) * X * X - 1) +
                        kp * kp * X * (-3 * kappa + 3 * (kappa - 1) * K - 7);
      return detail::KFractionSum(D, 1, 2).add(K * br, 1, 2).result(-1.0 / (6 * kp));
    }
    const double c = r2 - kp * (3 * kappa + 1);
    detail::KFractionSum s(D, 2, 4);
    s.add(-K * (K + 1) * (K * K * (4 * kp * kp + 3 * r4 + 3 * kp * (kappa + 3) * r2)), 0, 2);
    s.add(-K * (K + 1) *
              (3 * K * (8 * kp * kp * kp + r4 + kp * (5 * kappa + 7) * r2) +
               kp * kp * (45 * kappa * kappa + 84 * kappa - 6 * r2 + 38)),
          0, 2);
    s.add((-1.0 / kp) * K *
              (-6 * kp * kp * kp * (3 * kappa + 4) + K * K * K * r2 * (3 * kappa * kappa - 5 * r2 - 3) +
               2 * K * K * r2 * (10 * r2 - kp * (15 * kappa + 2))),
          0, 1);
    s.add((-1.0 / kp) * K * K * (-12 * kp * kp * kp + r4 + kp * (3 * kappa + 11) * r2), 0, 1);
    s.add(-(K - 2) * (K - 1) * (K - 1) * K * r2, 2, 0);
    s.add((r / kp) * (K - 1) * K *
              (K * (3 * kp * (kappa + 5) + K * (-3 * kappa * kappa + 5 * r2 + 3) + 9 * r2) -
               2 * (kappa + 2 * r2 + 1)),
          1, 0);
    s.add((-kp * c / 3) * K * (K + 1) * (K + 2) * (kp * (21 * kappa + 20) + 6 * K * (kappa + r2 + 1)), 0, 3);
    s.add((-kp * kp * c * c / 4) * K * (K + 1) * (K + 2) * (K + 3), 0, 4);
    return s.result(-1.0 / (18 * kp * kp));
  }
  const Polynomial D{kp, 0.0, -r};
  if (order == 1) {
    const BiPoly x2 = X * X;
    const BiPoly num = -(3 * (kappa * kappa - 1) + 2 * r2 * x2 - 3 * kp * r + 4 * r * x2) * K * K -
                       (-3 * (kappa * kappa + 5 * kappa + 4) - 2 * r2 * x2 + (9 * kappa + 14) * r * x2) * K;
    return detail::KFractionSum(D, 0, 2).add(num, 0, 2).result(1.0 / 6);
  }
  // Terms over D^2, D^3 (sign of (-D)^3 folded in), D^4, D and x^2; common factor 1/648.
  const double m = -3 * kappa + r - 1;
  const BiPoly one = BiPoly::in_x(Polynomial::constant(1.0));
  auto g = [&](double d2, double d3, double d4, double d1, double x2) {
    return std::vector<double>{d2, d3, d4, d1, x2};
  };
  const std::vector<double> g1 =
      g(180 * r2 - 48 * (68 * kappa + 77) * r + 6 * kappa * (1377 * kappa + 2680) + 7548,
        -(9936 * kappa * kappa * kp + 64 * kp * (9 * r - 59) * r - 5168 * kappa * kp * r + 13040 * kappa * kp +
          3200 * kp),
        432 * kp * kp * m * m, 12 * (-189 * kappa + 62 * r - 338), -72 * r / kp);
  const std::vector<double> g2 =
      g(90 * r2 + 24 * r * (56 * kappa - 9 * r + 35) - 24 * (68 * kappa + 77) * r + 48 * (59 * kappa + 62) +
            3 * kappa * (1377 * kappa + 2680) + 3774,
        -(7452 * kappa * kappa * kp + 48 * kp * (9 * r - 59) * r - 3876 * kappa * kp * r + 9780 * kappa * kp +
          2400 * kp - 288 * kp * (r + 2) * m),
        396 * kp * kp * m * m, -144 * (4 * r + 11), 108 * r / kp);
  const std::vector<double> g3 =
      g(72 * (r + 2) * (r + 2) + 12 * r * (56 * kappa - 9 * r + 35) + 24 * (59 * kappa + 62),
        -(1242 * kappa * kappa * kp - 216 * kp * (r + 2) * m + 1630 * kappa * kp + 8 * kp * r * (9 * r - 59) +
          400 * kp - 646 * kappa * kp * r),
        108 * kp * kp * m * m, -12 * (16 * kp - 9 * r2 + 14 * kp * r) / kp, -36 * r / kp);
  const std::vector<double> g4 = g(36 * (r + 2) * (r + 2), 36 * kp * (r + 2) * m, 9 * kp * kp * m * m, 0, 0);
  detail::KFractionSum s(D, 2, 4);
  const std::vector<double>* gs[] = {&g1, &g2, &g3, &g4};
  BiPoly kpow = K;
  for (const auto* gi : gs) {
    const auto& v = *gi;
    s.add(v[0] * kpow * one, 0, 2).add(v[1] * kpow * one, 0, 3).add(v[2] * kpow * one, 0, 4);
    s.add(v[3] * kpow * one, 0, 1).add(v[4] * kpow * one, 2, 0);
    kpow = kpow * K;
  }
  return s.result(1.0 / 648);
}

/// Alternate first-order operator f(x) d/dx + g(x) d^2/dx^2 for two-body couplings. It differs from
/// the eigenfunction correction by a k-dependent multiple of G_k^(0) (a normalization choice).
inline DiffOperator two_body_first_order_fg(double kappa, double r) {
  const double kp = kappa + 1, r2 = r * r;
  const double h1 = 2 * r2 / (3 * kp * kp), h2 = -(3 * kappa - 4) * r / (3 * kp * kp),
               h3 = -r * (3 * r2 * r - 3 * (kappa - 1) * kp * r) / (3 * kp * kp * kp * kp);
  const double s1 = -r / (3 * kp), s2 = r2 / (kp * kp), s3 = -(3 * kappa - 1) * r / (3 * kp * kp),
               s4 = -r2 * (-kappa * kappa + r2 + 1) / (2 * kp * kp * kp * kp);
  DiffOperator op;
  op.add(Polynomial{0.0, h1, h2, h3}, 1);
  op.add(Polynomial{0.0, s1, s2, s3, s4}, 2);
  return op;
}

/// Operators realizing the corrections through second order (unit coupling strength).
struct PerturbativeSolution {
  Interaction interaction = Interaction::two_body;
  double strength = 1.0;  // coupling strength a; time and eigenvalues scale by it
  double kappa = 0.0;     // kappa / a
  double r = 1.0;
  DiffOperator a0;
  double lambda1 = -2.0;  // first leading-order eigenvalue, unit strength
  KPolynomial g1_ratio, g2_ratio;
  Polynomial lambda1_k, lambda2_k;
  DiffOperator O1, O2, L1, L2;

  /// Applies one of the operators to a generating function, enforcing the physical guard.
  TruncatedSeries apply(const DiffOperator& op, const TruncatedSeries& s) const {
    return apply_operator(op, s, &a0, lambda1, /*physical=*/true);
  }
};

inline PerturbativeSolution build_correction_operators(Interaction which, const ModelParams& params) {
  if (params.pure_interaction() != which)
    throw UnsupportedError("corrections beyond leading order need pure two-body or pure three-body couplings; "
                           "use order 0 for mixtures");
  PerturbativeSolution s;
  s.interaction = which;
  s.strength = params.strength(which == Interaction::two_body ? 2 : 3);
  s.kappa = params.kappa / s.strength;
  s.r = params.r;
  const LOSolution lo(ModelParams::pure(which == Interaction::two_body ? 2 : 3, params.N, s.kappa, s.r, 1.0));
  s.a0 = lo.a0();
  s.lambda1 = lo.lambda1();
  s.g1_ratio = eigenfunction_correction(which, 1, s.kappa, s.r);
  s.g2_ratio = eigenfunction_correction(which, 2, s.kappa, s.r);
  s.lambda1_k = eigen_correction_poly(which, 1, s.kappa, s.r);
  s.lambda2_k = eigen_correction_poly(which, 2, s.kappa, s.r);
  s.O1 = kpoly_to_operator(s.g1_ratio);
  s.O2 = kpoly_to_operator(s.g2_ratio);
  s.L1 = kpoly_to_operator(KPolynomial::separable(s.lambda1_k, Polynomial::constant(1.0)));
  s.L2 = kpoly_to_operator(KPolynomial::separable(s.lambda2_k, Polynomial::constant(1.0)));
  return s;
}

}  // namespace opgrowth
