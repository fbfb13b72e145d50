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
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "opgrowth/combinatorics.hpp"
#include "opgrowth/errors.hpp"
#include "opgrowth/model.hpp"
#include "opgrowth/parallel.hpp"
#include "opgrowth/pauli.hpp"

namespace opgrowth {

struct EnsembleOptions {
  long realizations = 1000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t first_realization = 0;  // realization indices start here (disjoint seed ranges)
  int threads = 0;                      // 0: thread_count()
  bool track_hermiticity = false;
};

/// Mean and standard error of b_w(t) = sum_{wt(P)=w} c_P(t) c~_P(t) over realizations.
struct EnsembleResult {
  int N = 0;
  long realizations = 0;
  std::vector<double> t;
  std::vector<std::vector<double>> mean;    // [grid index][w], w = 0..N
  std::vector<std::vector<double>> std_error;  // same shape
  std::vector<double> norm_mean, norm_std_error;  // sum over w of each realization's estimate
  double max_hermiticity_defect = 0.0;      // max |O - O^dagger| seen after any step (if tracked)
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of the random stream of one realization; independent of execution order.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t realization) {
  return splitmix64(seed ^ splitmix64(realization ^ 0xD1B54A32D192ED03ull));
}

struct HamiltonianTerm {
  std::uint32_t x;
  std::vector<cplx> phase;  // <j ^ x| P |j>
  double sigma;             // standard deviation of the per-step coupling
};

inline std::vector<HamiltonianTerm> hamiltonian_terms(const ModelParams& params, double dt) {
  std::vector<HamiltonianTerm> terms;
  const int N = params.N;
  for (const auto& c : params.couplings) {
    if (c.a == 0.0) continue;
    const double sigma = std::sqrt(coupling_variance(c.n, c.a, N) / dt);
    for (std::uint32_t support = 0; support < (1u << N); ++support) {
      if (std::popcount(support) != c.n) continue;
      std::vector<int> sites;
      for (int q = 0; q < N; ++q)
        if ((support >> q) & 1) sites.push_back(q);
      int labels = 1;
      for (int i = 0; i < c.n; ++i) labels *= 3;
      for (int code = 0; code < labels; ++code) {
        PauliString p{N, 0, 0};
        int rest = code;
        for (int q : sites) {
          const int s = rest % 3;  // 0: X, 1: Y, 2: Z
          rest /= 3;
          if (s != 2) p.x |= 1u << q;
          if (s != 0) p.z |= 1u << q;
        }
        HamiltonianTerm t{p.x, std::vector<cplx>(std::size_t{1} << N), sigma};
        for (std::uint32_t j = 0; j < t.phase.size(); ++j) t.phase[j] = p.column_phase(j);
        terms.push_back(std::move(t));
      }
    }
  }
  return terms;
}

/// Taylor order for exp(A) with ||A||_1 <= norm such that the remainder is below tol.
inline int taylor_order(double norm, double tol) {
  int m = 1;
  double term = norm * norm / 2;
  while (term > tol && m < 40) ++m, term *= norm / (m + 1);
  return m;
}

/// exp(A) by a scaled Taylor polynomial of adaptive order, evaluated with the Paterson-Stockmeyer
/// scheme (about 2 sqrt(m) matrix products instead of m).
template <class Mat>
Mat expm_taylor(const Mat& A, double tol = 1e-13) {
  double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  while (norm > 0.5) norm *= 0.5, ++squarings;
  const int m = taylor_order(norm, tol);
  const Mat As = A * std::ldexp(1.0, -squarings);
  const int s = std::max(1, static_cast<int>(std::ceil(std::sqrt(m + 1.0))));
  std::vector<Mat> pw(s + 1);
  pw[0] = Mat::Identity(A.rows(), A.cols());
  pw[1] = As;
  for (int j = 2; j <= s; ++j) pw[j] = pw[j - 1] * As;
  std::vector<double> c(m + 1);
  c[0] = 1.0;
  for (int j = 1; j <= m; ++j) c[j] = c[j - 1] / j;
  // sum_j c_j A^j = sum_b (A^s)^b B_b with B_b = sum_{i<s} c_{bs+i} A^i, by Horner in A^s.
  const int blocks = m / s;
  Mat P = Mat::Zero(A.rows(), A.cols());
  for (int b = blocks; b >= 0; --b) {
    Mat B = Mat::Zero(A.rows(), A.cols());
    for (int i = 0; i < s && b * s + i <= m; ++i) B += c[b * s + i] * pw[i];
    P = (b == blocks) ? B : Mat(P * pw[s] + B);
  }
  for (int k = 0; k < squarings; ++k) P = (P * P).eval();
  return P;
}

/// Per-qubit depolarizing channel in the Heisenberg picture: every Pauli string is multiplied by
/// (1 - eps)^weight, implemented as O -> (1 - eps) O + eps (Tr_q O / 2) x I_q for each qubit.
template <class Mat>
void depolarize(Mat& O, int n, double eps) {
  if (eps == 0.0) return;
  const Eigen::Index d = O.rows();
  for (int q = 0; q < n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i & bit) continue;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j & bit) continue;
        const cplx a = O(i, j), b = O(i | bit, j | bit);
        const cplx avg = 0.5 * (a + b);
        O(i, j) = (1 - eps) * a + eps * avg;
        O(i | bit, j | bit) = (1 - eps) * b + eps * avg;
        O(i | bit, j) *= (1 - eps);
        O(i, j | bit) *= (1 - eps);
      }
    }
  }
}

}  // namespace detail

namespace detail {

struct EnsembleContext {
  int N;
  double r, rbar, eps, dt;
  std::vector<HamiltonianTerm> terms;
  std::vector<long> grid_steps;
  std::vector<int> weight_of;
  PauliString initial;
  bool track_hermiticity;
};

/// One realization; returns sum_{wt(P)=w} c_P c~_P at each grid time, flattened as [g * (N+1) + w].
template <class Mat>
std::vector<double> simulate_realization(const EnsembleContext& ctx, std::uint64_t stream, double& defect) {
  const Eigen::Index d = Eigen::Index{1} << ctx.N;
  const std::size_t G = ctx.grid_steps.size(), W = ctx.N + 1;
  std::mt19937_64 rng(stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat O = ctx.initial.matrix(), Ob = O, H(d, d), Hb(d, d);
  std::vector<double> out(G * W, 0.0);
  const cplx idt(0.0, ctx.dt);
  auto record = [&](std::size_t g) {
    const auto c = pauli_decompose(O), cb = pauli_decompose(Ob);
    for (std::size_t idx = 0; idx < c.size(); ++idx)
      out[g * W + ctx.weight_of[idx]] += (std::conj(c[idx]) * cb[idx]).real();
  };
  std::size_t g = 0;
  for (long step = 0;; ++step) {
    while (g < G && ctx.grid_steps[g] == step) record(g++);
    if (g == G) break;
    H.setZero();
    Hb.setZero();
    for (const auto& term : ctx.terms) {
      const double J = term.sigma * normal(rng);
      const double Jb = ctx.r * J + ctx.rbar * term.sigma * normal(rng);
      for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::Index row = j ^ static_cast<Eigen::Index>(term.x);
        H(row, j) += J * term.phase[j];
        Hb(row, j) += Jb * term.phase[j];
      }
    }
    const Mat U = expm_taylor<Mat>(idt * H), Ub = expm_taylor<Mat>(idt * Hb);
    Mat T = U * O;
    O.noalias() = T * U.adjoint();
    T = Ub * Ob;
    Ob.noalias() = T * Ub.adjoint();
    depolarize(O, ctx.N, ctx.eps);
    depolarize(Ob, ctx.N, ctx.eps);
    if (ctx.track_hermiticity)
      defect = std::max({defect, (O - O.adjoint()).cwiseAbs().maxCoeff(), (Ob - Ob.adjoint()).cwiseAbs().maxCoeff()});
  }
  return out;
}

inline std::vector<double> simulate_realization_any(const EnsembleContext& ctx, std::uint64_t stream,
                                                    double& defect) {
  switch (ctx.N) {
    case 1: return simulate_realization<Eigen::Matrix<cplx, 2, 2>>(ctx, stream, defect);
    case 2: return simulate_realization<Eigen::Matrix<cplx, 4, 4>>(ctx, stream, defect);
    case 3: return simulate_realization<Eigen::Matrix<cplx, 8, 8>>(ctx, stream, defect);
    case 4: return simulate_realization<Eigen::Matrix<cplx, 16, 16>>(ctx, stream, defect);
    case 5: return simulate_realization<Eigen::Matrix<cplx, 32, 32>>(ctx, stream, defect);
    default: return simulate_realization<CMatrix>(ctx, stream, defect);
  }
}

}  // namespace detail

/// Monte Carlo estimate of b_w(t) from the microscopic circuit: each step draws Gaussian couplings
/// J (forward) and r J + sqrt(1 - r^2) J' (backward), conjugates both branches by the exact step
/// propagators, then depolarizes each branch by (1 - kappa dt) per qubit.
inline EnsembleResult run_ensemble(const ModelParams& params, const PauliString& initial,
                                   std::span<const double> t_grid, const EnsembleOptions& opt) {
  params.validate();
  const int N = params.N;
  if (N > kMaxPauliQubits) throw DomainError("run_ensemble: N > 6 exceeds the resource guard");
  if (initial.n != N) throw DomainError("run_ensemble: initial string length must equal N");
  if (initial.weight() == 0) throw DomainError("run_ensemble: initial string must not be the identity");
  if (opt.realizations < 100) throw DomainError("run_ensemble: at least 100 realizations are required");
  if (!(opt.dt > 0) || opt.dt * (params.a_sigma() + params.kappa) > 1e-2)
    throw DomainError("run_ensemble: need 0 < dt <= 1e-2 / (a_sigma + kappa)");
  detail::EnsembleContext ctx{N, params.r, std::sqrt(std::max(0.0, 1.0 - params.r * params.r)),
                              params.kappa * opt.dt, opt.dt, detail::hamiltonian_terms(params, opt.dt),
                              {}, {}, initial, opt.track_hermiticity};
  for (double t : t_grid) {
    const double s = t / opt.dt;
    const long k = std::lround(s);
    if (t < 0 || std::abs(s - k) > 1e-6 || (!ctx.grid_steps.empty() && k <= ctx.grid_steps.back()))
      throw DomainError("run_ensemble: grid times must be increasing multiples of dt");
    ctx.grid_steps.push_back(k);
  }
  if (ctx.grid_steps.empty()) throw DomainError("run_ensemble: empty time grid");
  ctx.weight_of.resize(std::size_t{1} << (2 * N));
  for (std::uint32_t idx = 0; idx < ctx.weight_of.size(); ++idx)
    ctx.weight_of[idx] = PauliString::from_index(N, idx).weight();

  const std::size_t G = t_grid.size(), W = N + 1;
  std::vector<std::vector<double>> samples(opt.realizations);
  std::vector<double> defects(opt.realizations, 0.0);
  parallel_for(
      static_cast<std::size_t>(opt.realizations),
      [&](std::size_t rlz) {
        samples[rlz] = detail::simulate_realization_any(
            ctx, detail::stream_seed(opt.seed, opt.first_realization + rlz), defects[rlz]);
      },
      opt.threads > 0 ? opt.threads : thread_count());

  // Deterministic reduction in realization order.
  EnsembleResult res;
  res.N = N;
  res.realizations = opt.realizations;
  res.t.assign(t_grid.begin(), t_grid.end());
  res.mean.assign(G, std::vector<double>(W, 0.0));
  res.std_error.assign(G, std::vector<double>(W, 0.0));
  const double R = static_cast<double>(opt.realizations);
  for (const auto& s : samples)
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t w = 0; w < W; ++w) res.mean[g][w] += s[g * W + w] / R;
  for (const auto& s : samples)
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t w = 0; w < W; ++w) {
        const double dv = s[g * W + w] - res.mean[g][w];
        res.std_error[g][w] += dv * dv;
      }
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t w = 0; w < W; ++w) res.std_error[g][w] = std::sqrt(res.std_error[g][w] / (R - 1) / R);
  res.norm_mean.assign(G, 0.0);
  res.norm_std_error.assign(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    for (const auto& s : samples)
      for (std::size_t w = 0; w < W; ++w) res.norm_mean[g] += s[g * W + w] / R;
    double ss = 0.0;
    for (const auto& s : samples) {
      double tot = 0.0;
      for (std::size_t w = 0; w < W; ++w) tot += s[g * W + w];
      ss += (tot - res.norm_mean[g]) * (tot - res.norm_mean[g]);
    }
    res.norm_std_error[g] = std::sqrt(ss / (R - 1) / R);
  }
  for (double dfx : defects) res.max_hermiticity_defect = std::max(res.max_hermiticity_defect, dfx);
  return res;
}

}  // namespace opgrowth
