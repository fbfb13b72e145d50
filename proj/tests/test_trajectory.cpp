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

#include <random>

#include "opgrowth/generator.hpp"
#include "opgrowth/integrate.hpp"
#include "opgrowth/trajectory.hpp"
#include "oracles.hpp"

namespace opgrowth {
namespace {

CMatrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Eigen::Index d = Eigen::Index{1} << n;
  CMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

TEST(PauliString, MatricesMatchKroneckerProducts) {
  for (const auto& s : oracle::all_pauli_strings(3))
    EXPECT_LT((PauliString::parse(s).matrix() - oracle::pauli_matrix(s)).cwiseAbs().maxCoeff(), 1e-15) << s;
  EXPECT_LT((PauliString::parse("XYZIY").matrix() - oracle::pauli_matrix("XYZIY")).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PauliString, LabelsWeightsAndCommutation) {
  const auto strings = oracle::all_pauli_strings(3);
  for (const auto& a : strings) {
    const auto pa = PauliString::parse(a);
    EXPECT_EQ(pa.label(), a);
    EXPECT_EQ(pa.weight(), oracle::weight(a));
    EXPECT_EQ(PauliString::from_index(3, pa.index()).label(), a);
    for (const auto& b : strings) EXPECT_EQ(pa.commutes_with(PauliString::parse(b)), !oracle::anticommute(a, b));
  }
  EXPECT_THROW(PauliString::parse("XQ"), DomainError);
  EXPECT_THROW(PauliString::parse("XXXXXXX"), DomainError);
  EXPECT_THROW(PauliString::parse(""), DomainError);
}

TEST(PauliDecompose, RoundTripAndOrthogonality) {
  const CMatrix m = random_matrix(3, 11);
  const auto c = pauli_decompose(m);
  EXPECT_LT((pauli_compose(3, c) - m).cwiseAbs().maxCoeff(), 1e-13);
  for (const auto& s : {"XIZ", "YYY", "IIZ"}) {
    const auto p = PauliString::parse(s);
    const auto cp = pauli_decompose(oracle::pauli_matrix(s));
    for (std::uint32_t idx = 0; idx < cp.size(); ++idx)
      EXPECT_NEAR(std::abs(cp[idx] - (idx == p.index() ? 1.0 : 0.0)), 0.0, 1e-15);
  }
  EXPECT_THROW(pauli_decompose(CMatrix::Zero(3, 3)), DomainError);
  EXPECT_THROW(pauli_compose(2, std::vector<cplx>(15)), DomainError);
}

TEST(ExpmTaylor, MatchesEigenExponential) {
  for (double scale : {1e-3, 0.3, 5.0}) {
    CMatrix h = random_matrix(3, 5);
    h = 0.5 * (h + h.adjoint().eval());
    const CMatrix A = cplx(0, scale) * h;
    const CMatrix ref = A.exp();
    EXPECT_LT((detail::expm_taylor(A) - ref).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    const Eigen::Matrix<cplx, 8, 8> fixed = A;
    EXPECT_LT((detail::expm_taylor(fixed) - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Depolarize, ScalesEachStringByWeight) {
  const int n = 3;
  CMatrix m = random_matrix(n, 21);
  const auto before = pauli_decompose(m);
  const double eps = 0.013;
  detail::depolarize(m, n, eps);
  const auto after = pauli_decompose(m);
  for (std::uint32_t idx = 0; idx < before.size(); ++idx) {
    const int w = PauliString::from_index(n, idx).weight();
    EXPECT_LT(std::abs(after[idx] - std::pow(1 - eps, w) * before[idx]), 1e-14);
  }
}

TEST(StreamSeed, DistinctPerRealizationAndSeed) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(detail::stream_seed(s, r));
  EXPECT_EQ(seen.size(), 4000u);
}

TEST(Ensemble, IdenticalBranchesConserveNorm) {
  const ModelParams p = ModelParams::pure(2, 3, 0.0, 1.0);
  const std::vector<double> t{0.0, 0.05, 0.1};
  EnsembleOptions opt;
  opt.realizations = 100;
  opt.track_hermiticity = true;
  const auto res = run_ensemble(p, PauliString::parse("XII"), t, opt);
  for (std::size_t g = 0; g < t.size(); ++g) {
    EXPECT_NEAR(res.norm_mean[g], 1.0, 1e-10);
    EXPECT_LT(res.norm_std_error[g], 1e-10);
  }
  EXPECT_DOUBLE_EQ(res.mean[0][1], 1.0);
  EXPECT_LE(res.max_hermiticity_defect, 1e-10);
}

TEST(Ensemble, IdentitySectorStaysEmpty) {
  const ModelParams p = ModelParams::pure(2, 3, 0.4, 0.0);
  const std::vector<double> t{0.0, 0.1};
  EnsembleOptions opt;
  opt.realizations = 100;
  const auto res = run_ensemble(p, PauliString::parse("XZI"), t, opt);
  for (std::size_t g = 0; g < t.size(); ++g) EXPECT_NEAR(res.mean[g][0], 0.0, 1e-14);
}

TEST(Ensemble, DeterministicAcrossThreadCounts) {
  const ModelParams p = ModelParams::pure(2, 3, 0.3, 0.6);
  const std::vector<double> t{0.0, 0.04};
  EnsembleOptions a;
  a.realizations = 120;
  a.seed = 99;
  a.threads = 1;
  EnsembleOptions b = a;
  b.threads = 4;
  const auto ra = run_ensemble(p, PauliString::parse("YII"), t, a);
  const auto rb = run_ensemble(p, PauliString::parse("YII"), t, b);
  EXPECT_EQ(ra.mean, rb.mean);
  EXPECT_EQ(ra.std_error, rb.std_error);
  EnsembleOptions c = a;
  c.first_realization = 120;
  const auto rc = run_ensemble(p, PauliString::parse("YII"), t, c);
  EXPECT_NE(ra.mean, rc.mean);
  EnsembleOptions d = a;
  d.seed = 100;
  EXPECT_NE(ra.mean, run_ensemble(p, PauliString::parse("YII"), t, d).mean);
}

TEST(Ensemble, AgreesWithMasterEquation) {
  const ModelParams p = ModelParams::pure(2, 3, 0.2, 0.5);
  const std::vector<double> t{0.0, 0.1, 0.2};
  EnsembleOptions opt;
  opt.realizations = 400;
  opt.seed = 3;
  const auto res = run_ensemble(p, PauliString::parse("XII"), t, opt);
  const auto ode = evolve(build_generator(p), WeightDistribution::delta(1, 3), t);
  for (std::size_t g = 0; g < t.size(); ++g)
    for (int w = 1; w <= 3; ++w)
      EXPECT_LE(std::abs(res.mean[g][w] - ode[g].at(w)), 4 * res.std_error[g][w] + 2e-3)
          << "t=" << t[g] << " w=" << w;
}

TEST(Ensemble, ThreeBodyKeepsWeightParity) {
  const ModelParams p = ModelParams::pure(3, 6, 0.1, 0.7);
  const std::vector<double> t{0.0, 0.01};
  EnsembleOptions opt;
  opt.realizations = 100;
  const auto res = run_ensemble(p, PauliString::parse("XIIIII"), t, opt);
  for (int w = 0; w <= 6; w += 2) EXPECT_NEAR(res.mean[1][w], 0.0, 1e-12) << "w=" << w;
  EXPECT_GT(res.mean[1][3], 0.0);
}

TEST(Ensemble, RejectsInvalidRequests) {
  const std::vector<double> t{0.0, 0.01};
  EnsembleOptions opt;
  opt.realizations = 100;
  EXPECT_THROW(run_ensemble(ModelParams::pure(2, 7, 0.0, 1.0), PauliString::parse("XIIIII"), t, opt), DomainError);
  const ModelParams p = ModelParams::pure(2, 3, 0.0, 1.0);
  EXPECT_THROW(run_ensemble(p, PauliString::parse("XI"), t, opt), DomainError);
  EXPECT_THROW(run_ensemble(p, PauliString::parse("III"), t, opt), DomainError);
  EnsembleOptions few = opt;
  few.realizations = 99;
  EXPECT_THROW(run_ensemble(p, PauliString::parse("XII"), t, few), DomainError);
  EnsembleOptions coarse = opt;
  coarse.dt = 0.05;
  EXPECT_THROW(run_ensemble(p, PauliString::parse("XII"), t, coarse), DomainError);
  const std::vector<double> off{0.0, 0.0105};
  EXPECT_THROW(run_ensemble(p, PauliString::parse("XII"), off, opt), DomainError);
  const std::vector<double> back{0.01, 0.0};
  EXPECT_THROW(run_ensemble(p, PauliString::parse("XII"), back, opt), DomainError);
}

TEST(ParallelFor, VisitsEachIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 8);
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(50, [](std::size_t i) { if (i == 17) throw DomainError("boom"); }, 4), DomainError);
}

}  // namespace
}  // namespace opgrowth
