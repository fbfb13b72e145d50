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

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "opgrowth/errors.hpp"
#include "opgrowth/generator.hpp"
#include "opgrowth/model.hpp"

namespace opgrowth {

namespace detail {

/// Parlett-Reinsch diagonal balancing with power-of-two scalings (similarity transform, in place).
inline void balance(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  constexpr double radix = 2.0, sqrdx = radix * radix;
  bool done = false;
  for (int sweep = 0; !done && sweep < 200; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) c += std::abs(A(j, i)), r += std::abs(A(i, j));
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) f *= radix, c *= sqrdx;
      g = r * radix;
      while (c > g) f /= radix, c /= sqrdx;
      if ((c + r) / f < 0.95 * s) {
        done = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

/// The k_max eigenvalues of largest real part, in descending order of real part.
inline std::vector<std::complex<double>> leading_eigenvalues(const BandedGenerator& gen, int k_max) {
  if (k_max < 1 || k_max > gen.size()) throw DomainError("leading_eigenvalues: need 1 <= k_max <= N");
  Eigen::MatrixXd A = gen.dense();
  detail::balance(A);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("leading_eigenvalues: eigensolver did not converge");
  std::vector<std::complex<double>> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::stable_sort(ev.begin(), ev.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  ev.resize(k_max);
  return ev;
}

/// Right and left eigenvectors of the truncated leading-order generator for eigenvalue index k,
/// both normalized so that component k equals 1. The left vector is supported on w <= k,
/// the right vector on w >= k.
inline std::pair<std::vector<double>, std::vector<double>> lo_left_right_eigvecs(const ModelParams& params, int k,
                                                                                int w_max) {
  if (k < 1 || k > w_max) throw DomainError("lo_left_right_eigvecs: need 1 <= k <= W_max");
  const BandedGenerator M = build_lo_generator(params, w_max);
  const double lambda = M(k, k);
  std::vector<double> right(w_max, 0.0), left(w_max, 0.0);
  right[k - 1] = 1.0;
  for (int j = k + 1; j <= w_max; ++j) {
    const double denom = lambda - M(j, j);
    if (denom == 0.0) throw NumericalError("lo_left_right_eigvecs: degenerate diagonal");
    double acc = 0.0;
    for (int i = std::max(k, j - M.half_width()); i < j; ++i) acc += M(j, i) * right[i - 1];
    right[j - 1] = acc / denom;
  }
  left[k - 1] = 1.0;
  for (int j = k - 1; j >= 1; --j) {
    const double denom = lambda - M(j, j);
    if (denom == 0.0) throw NumericalError("lo_left_right_eigvecs: degenerate diagonal");
    double acc = 0.0;
    for (int i = j + 1; i <= std::min(k, j + M.half_width()); ++i) acc += left[i - 1] * M(i, j);
    left[j - 1] = acc / denom;
  }
  return {std::move(right), std::move(left)};
}

/// Coefficients c_0..c_d of a polynomial in h = 1/N fitted to values at the given N
/// (least squares; exact interpolation when the number of sizes equals d + 1).
inline std::vector<double> fit_inverse_n(std::span<const int> Ns, std::span<const double> values, int degree) {
  if (Ns.size() != values.size()) throw DomainError("fit_inverse_n: size mismatch");
  if (degree < 0 || static_cast<int>(Ns.size()) < degree + 1)
    throw NumericalError("fit_inverse_n: fit is degenerate (need more sizes than the degree)");
  const Eigen::Index m = static_cast<Eigen::Index>(Ns.size());
  // Columns scaled by a reference size to keep the normal equations well conditioned.
  const double h0 = 1.0 / *std::min_element(Ns.begin(), Ns.end());
  Eigen::MatrixXd V(m, degree + 1);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = 1.0 / Ns[i];
    for (int j = 0; j <= degree; ++j) V(i, j) = std::pow(h / h0, j);
    y(i) = values[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  if (qr.rank() < degree + 1) throw NumericalError("fit_inverse_n: fit is degenerate (repeated sizes)");
  const Eigen::VectorXd c = qr.solve(y);
  std::vector<double> out(degree + 1);
  for (int j = 0; j <= degree; ++j) out[j] = c(j) / std::pow(h0, j);
  return out;
}

/// Default fit degree: cubic when four or more sizes are available, quadratic otherwise.
inline int default_fit_degree(std::size_t n_sizes) { return n_sizes >= 4 ? 3 : 2; }

}  // namespace opgrowth
