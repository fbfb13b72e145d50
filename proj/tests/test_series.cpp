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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "opgrowth/diff_operator.hpp"
#include "opgrowth/lo_solution.hpp"
#include "opgrowth/rational.hpp"
#include "opgrowth/series.hpp"

namespace opgrowth {
namespace {

TruncatedSeries x_series(int P) { return TruncatedSeries::monomial(1, 1.0, P); }

void expect_series_near(const TruncatedSeries& a, const TruncatedSeries& b, double tol, int upto = -1) {
  const int hi = upto < 0 ? std::min(a.precision(), b.precision()) : upto;
  const int lo = std::min(a.offset(), b.offset());
  for (int p = lo; p < hi; ++p) {
    const double u = p >= a.offset() ? a[p] : 0.0, v = p >= b.offset() ? b[p] : 0.0;
    EXPECT_NEAR(u, v, tol) << "power " << p;
  }
}

TruncatedSeries random_series(std::mt19937_64& rng, int P) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(P);
  for (double& v : c) v = u(rng);
  return TruncatedSeries(0, c);
}

TEST(SeriesArith, Products) {
  const auto x = x_series(8);
  const auto xx = x * x;
  EXPECT_EQ(xx[2], 1.0);
  EXPECT_EQ(xx[1], 0.0);
  const auto geo = x / (TruncatedSeries::monomial(0, 1.0, 8) - x);
  for (int p = 1; p < 8; ++p) EXPECT_DOUBLE_EQ(geo[p], 1.0);
  EXPECT_THROW(xx[9], DomainError);
}

TEST(SeriesArith, NegativeBinomialSeries) {
  const double r = 2.0 / 3.0;
  const auto s = pow(Polynomial{1.0, -r}.to_series(11), -3.0);
  const auto q = TruncatedSeries::monomial(0, 1.0, 11) / (Polynomial{1.0, -r}.pow(3)).to_series(11);
  for (int n = 0; n <= 10; ++n) {
    const double ref = 0.5 * (n + 1) * (n + 2) * std::pow(r, n);  // C(n+2, 2) r^n
    EXPECT_NEAR(s[n], ref, 1e-12 * ref);
    EXPECT_NEAR(q[n], ref, 1e-12 * ref);
  }
}

TEST(SeriesArith, PrecisionTracking) {
  const TruncatedSeries a(1, std::vector<double>(9, 1.0));   // x .. x^9, precision 10
  const TruncatedSeries b(2, std::vector<double>(4, 1.0));   // x^2 .. x^5, precision 6
  EXPECT_EQ((a * b).precision(), std::min(10 + 2, 6 + 1));
  EXPECT_EQ((a + b).precision(), 6);
  EXPECT_EQ(derivative(a).precision(), 9);
  EXPECT_EQ(integral(a).precision(), 11);
}

TEST(SeriesArith, RingLaws) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_series(rng, 32), b = random_series(rng, 32), c = random_series(rng, 32);
    expect_series_near((a * b) * c, a * (b * c), 1e-12);
    expect_series_near(a * (b + c), a * b + a * c, 1e-12);
    expect_series_near(a + b, b + a, 0.0);
  }
}

TEST(SeriesArith, DivisionInvertsMultiplication) {
  std::mt19937_64 rng(5);
  auto b = random_series(rng, 24);
  b = b + TruncatedSeries::monomial(0, 3.0, 24);
  const auto a = random_series(rng, 24);
  expect_series_near((a * b) / b, a, 1e-11);
}

TEST(SeriesArith, ExpAndPowAgree) {
  const auto s = Polynomial{1.0, 0.3, -0.2}.to_series(20);
  const auto viaPow = pow(s, 0.5);
  expect_series_near(viaPow * viaPow, s, 1e-13);
  const auto e = exp(Polynomial{0.0, 1.0}.to_series(12));
  double f = 1.0;
  for (int n = 0; n < 12; ++n, f *= n) EXPECT_NEAR(e[n], 1.0 / f, 1e-15);
}

TEST(Compose, Basics) {
  const auto f = Polynomial{0.0, 0.0, 1.0}.to_series(10);
  const auto g = Polynomial{0.0, 2.0}.to_series(10);
  const auto h = compose(f, g);
  EXPECT_NEAR(h[2], 4.0, 1e-15);
  for (int p = 0; p < h.precision(); ++p)
    if (p != 2) EXPECT_EQ(h[p], 0.0);
  std::mt19937_64 rng(3);
  const auto r = random_series(rng, 16);
  expect_series_near(compose(r, x_series(16)), r, 1e-15);
  EXPECT_THROW(compose(r, TruncatedSeries::monomial(0, 1.0, 16)), DomainError);
}

TEST(Compose, FlowShiftsLeadingEigenfunction) {
  for (int n : {2, 3}) {
    const LOSolution lo(ModelParams::pure(n, 100, 0.5, 1.0));
    const int P = 64;
    for (double t : {0.1, 0.5, 2.0}) {
      const auto lhs = compose(lo.g1_series(P), lo.flow_series(t, P));
      const auto rhs = std::exp(lo.lambda1() * t) * lo.g1_series(P);
      expect_series_near(lhs, rhs, 1e-10, P);
    }
  }
}

TEST(InvertFlow, Basics) {
  const LOSolution two(ModelParams::pure(2, 100, 0.5, 1.0));
  const auto G1 = two.g1_series(96);
  expect_series_near(invert_flow(G1, 1.0), x_series(96), 1e-14);
  const auto xt = invert_flow(G1, 0.5);
  EXPECT_NEAR(xt.evaluate(1.0), 0.75, 1e-10);
  EXPECT_NEAR(two.flow(1.0, std::log(0.5) / two.lambda1()), 0.75, 1e-14);
  const LOSolution three(ModelParams::pure(3, 100, 0.5, 1.0));
  const auto odd = invert_flow(three.g1_series(64), 0.3);
  for (int p = 0; p < 64; p += 2) EXPECT_NEAR(odd[p], 0.0, 1e-15);
  EXPECT_THROW(invert_flow(G1, 0.0), DomainError);
}

TEST(InvertFlow, RoundTrip) {
  const int P = 40;
  const auto g = Polynomial{0.0, 1.0, 0.3, -0.1}.to_series(P);
  expect_series_near(invert_flow(g, 1.0), x_series(P), 1e-12);
  const LOSolution lo(ModelParams::pure(2, 50, 0.3, 0.9));
  const auto G1 = lo.g1_series(P);
  const auto y = invert_flow(G1, 0.6);
  expect_series_near(compose(G1, y), 0.6 * G1, 1e-10);
  expect_series_near(y, lo.flow_series(std::log(0.6) / lo.lambda1(), P), 1e-10);
}

TEST(ApplyOperator, Basics) {
  const auto x3 = TruncatedSeries::monomial(3, 1.0, 12);
  const auto zero = apply_operator(DiffOperator{}, x3);
  EXPECT_EQ(zero.max_abs(), 0.0);
  const auto d = apply_operator(DiffOperator::derivative(1), x3);
  EXPECT_EQ(d[2], 3.0);
  EXPECT_EQ(d[3], 0.0);
  const auto id = apply_operator(DiffOperator::identity(), x3);
  expect_series_near(id, x3, 0.0);
}

TEST(ApplyOperator, LeadingGeneratorEigenfunctions) {
  for (int n : {2, 3}) {
    const LOSolution lo(ModelParams::pure(n, 100, 0.5, 1.0));
    const DiffOperator a0 = lo.a0();
    for (int k = 1; k <= 6; ++k) {
      const auto Gk = lo.gk_series(k, 64);
      const auto lhs = apply_operator(a0, Gk);
      expect_series_near(lhs, lo.lambda(k) * Gk, 1e-10, 63);
    }
  }
  const LOSolution lo(ModelParams::pure(2, 100, 0.5, 1.0));
  EXPECT_DOUBLE_EQ(lo.lambda(2), -6.0);
}

TEST(ApplyOperator, PowerLawStructure) {
  for (int n : {2, 3}) {
    const LOSolution lo(ModelParams::pure(n, 100, 0.5, 0.8));
    const auto G1 = lo.g1_series(64);
    TruncatedSeries acc = G1;
    for (int k = 2; k <= 6; ++k) {
      acc = (acc * G1).truncated(64);
      expect_series_near(lo.gk_series(k, 64), acc, 1e-12);
    }
  }
}

TEST(KPolyToOperator, ReproducesEigenvaluePowers) {
  const LOSolution lo(ModelParams::pure(2, 100, 0.5, 1.0));
  const DiffOperator a0 = lo.a0();
  auto kp = [](std::vector<RationalFunction> q) { return KPolynomial(std::move(q)); };
  auto apply = [&](const KPolynomial& q, const TruncatedSeries& s) {
    return apply_operator(kpoly_to_operator(q), s, &a0, lo.lambda1());
  };
  const auto G2 = lo.gk_series(2, 64), G3 = lo.gk_series(3, 64);
  expect_series_near(apply(kp({Polynomial::constant(1.0)}), G2), G2, 1e-14);
  expect_series_near(apply(kp({Polynomial{}, Polynomial::constant(1.0)}), G2), 2.0 * G2, 1e-10, 63);
  expect_series_near(apply(kp({Polynomial{}, Polynomial{}, Polynomial::constant(1.0)}), G3), 9.0 * G3,
                     1e-10, 62);
  EXPECT_THROW(apply_operator(kpoly_to_operator(kp({Polynomial{}, Polynomial::constant(1.0)})), G2),
               DomainError);
}

TEST(ApplyOperator, PhysicalGuardStripsNonPositivePowers) {
  const RationalFunction inv_x(Polynomial::constant(1.0), Polynomial{0.0, 1.0});
  DiffOperator op;
  op.add(inv_x, 0);
  const auto x2 = TruncatedSeries::monomial(2, 1.0, 10);
  const auto out = apply_operator(op, x2, nullptr, 1.0, true);
  EXPECT_EQ(out[1], 1.0);
  const auto x1 = TruncatedSeries::monomial(1, 1.0, 10);
  EXPECT_THROW(apply_operator(op, x1, nullptr, 1.0, true), NumericalError);
}

TEST(BiorthogonalPairing, LeadingEigenbasis) {
  const double q = 2.0 / 3.0;
  const LOSolution lo(ModelParams::pure(2, 100, 0.5, 1.0));
  auto W = [&](int k) {
    // x^k (1 - q/x)^(k-1)
    std::vector<double> c(k + 1, 0.0);
    double binom = 1.0;
    for (int j = 0; j <= k - 1; ++j) {
      c[k - j] = binom * std::pow(-q, j);
      binom = binom * (k - 1 - j) / (j + 1);
    }
    return TruncatedSeries(0, c);
  };
  for (int j = 1; j <= 8; ++j)
    for (int k = 1; k <= 8; ++k)
      EXPECT_NEAR(biorthogonal_pairing(W(j), lo.gk_series(k, 64)), j == k ? 1.0 : 0.0, 1e-10) << j << "," << k;
  const auto Ginit = initial_series(WeightDistribution::delta(1, 10), 64);
  EXPECT_NEAR(biorthogonal_pairing(W(1), Ginit), 1.0, 1e-15);
}

TEST(JetEval, ClosedForms) {
  const auto j = jet_eval(Polynomial{0.0, 0.0, 1.0}.to_series(5), 1.0, 2);
  EXPECT_EQ(j.value(), 1.0);
  EXPECT_EQ(j.derivative(1), 2.0);
  EXPECT_EQ(j.derivative(2), 2.0);
  const auto g = TruncatedSeries::monomial(0, 1.0, 200) / Polynomial{1.0, -2.0 / 3.0}.to_series(200);
  const auto jg = jet_eval(g, 1.0, 1);
  EXPECT_NEAR(jg.value(), 3.0, 1e-12);
  EXPECT_NEAR(jg.derivative(1), 6.0, 1e-10);
}

TEST(JetEval, DetectsUnconvergedWindow) {
  const auto g = TruncatedSeries::monomial(0, 1.0, 30) / Polynomial{1.0, -0.9}.to_series(30);
  EXPECT_THROW(jet_eval(g, 1.0, 1), ConvergenceError);
}

TEST(JetEval, FlowAtTimeZeroIsIdentity) {
  const LOSolution lo(ModelParams::pure(2, 100, 0.5, 1.0));
  const auto a = jet_eval(compose(lo.g1_series(160), lo.flow_series(0.0, 160)), 1.0, 3);
  const auto b = jet_eval(lo.g1_series(160), 1.0, 3);
  for (int j = 0; j <= 3; ++j) EXPECT_NEAR(a.taylor(j), b.taylor(j), 1e-12 * std::abs(b.taylor(j)));
}

TEST(JetArithmetic, ProductAndQuotientRules) {
  const Jet x = Jet::variable(2.0, 3);
  const Jet one = Jet::constant(2.0, 1.0, 3);
  const Jet sq = x * x;
  EXPECT_EQ(sq.value(), 4.0);
  EXPECT_EQ(sq.derivative(1), 4.0);
  EXPECT_EQ(sq.derivative(2), 2.0);
  const Jet inv = one / x;  // 1/x at 2: 1/2, -1/4, 2/8, -6/16
  EXPECT_DOUBLE_EQ(inv.derivative(3), -6.0 / 16);
  EXPECT_THROW(one / Jet::constant(2.0, 0.0, 3), DomainError);
}

TEST(RationalFunction, LaurentExpansion) {
  // (1 + x) / (x^2 (1 - x)) = x^-2 + 2 x^-1 + 2 + 2x + ...
  const RationalFunction f(Polynomial{1.0, 1.0}, Polynomial{0.0, 0.0, 1.0} * Polynomial{1.0, -1.0});
  const auto s = f.to_series(5);
  EXPECT_EQ(s.offset(), -2);
  EXPECT_NEAR(s[-2], 1.0, 1e-15);
  EXPECT_NEAR(s[-1], 2.0, 1e-15);
  for (int p = 0; p < 5; ++p) EXPECT_NEAR(s[p], 2.0, 1e-15);
  EXPECT_NEAR(f(0.5), 1.5 / (0.25 * 0.5), 1e-14);
  const CommonDenominator cd(Polynomial{1.0, -1.0}, 1, 2);
  const auto sum = cd.term(Polynomial::constant(1.0), 1, 0) + cd.term(Polynomial::constant(2.0), 0, 2);
  EXPECT_NEAR(sum(0.3), 1.0 / 0.3 + 2.0 / (0.7 * 0.7), 1e-12);
  EXPECT_THROW(cd.term(Polynomial::constant(1.0), 2, 0), DomainError);
}

}  // namespace
}  // namespace opgrowth
