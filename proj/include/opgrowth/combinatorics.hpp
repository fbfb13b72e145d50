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

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "opgrowth/errors.hpp"

namespace opgrowth {

using BigInt = boost::multiprecision::cpp_int;

/// C(a, b) with the convention C(a, b) = 0 for b < 0 or b > a.
inline BigInt binomial(std::int64_t a, std::int64_t b) {
  if (a < 0) throw DomainError("binomial: negative upper argument " + std::to_string(a));
  if (b < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  BigInt result = 1;
  for (std::int64_t i = 1; i <= b; ++i) {
    result *= a - b + i;
    result /= i;  // exact: result is C(a-b+i, i) here
  }
  return result;
}

inline BigInt pow_int(std::int64_t base, std::int64_t e) {
  BigInt out = 1;
  for (std::int64_t i = 0; i < e; ++i) out *= base;
  return out;
}

/// Overlap of a weight-n string with a fixed weight-w string on N qubits:
/// p sites anticommute, m sites carry the same Pauli, n-m-p sites fall outside the support.
struct OverlapPattern {
  int n = 2;
  int p = 1;
  int m = 0;
  int w = 0;
  int N = 1;
};

inline BigInt pattern_count(const OverlapPattern& pat) {
  const auto [n, p, m, w, N] = pat;
  if (p % 2 == 0) throw DomainError("pattern_count: p must be odd for anticommutation");
  if (n < 2 || p < 1 || m < 0 || p + m > n) throw DomainError("pattern_count: require p + m <= n");
  if (N < 1 || w < 0 || w > N) throw DomainError("pattern_count: require 0 <= w <= N");
  if (w < p) return 0;
  return pow_int(2, p) * pow_int(3, n - m - p) * binomial(w, p) * binomial(w - p, m) *
         binomial(N - w, n - m - p);
}

/// Number of weight-n strings anticommuting with a fixed weight-w string.
inline BigInt anticommute_total(int n, int w, int N) {
  if (n < 2) throw DomainError("anticommute_total: n must be >= 2");
  if (w < 0 || w > N) throw DomainError("anticommute_total: require 0 <= w <= N");
  BigInt total = 0;
  for (int p = 1; p <= n; p += 2)
    for (int m = 0; p + m <= n; ++m) total += pattern_count({n, p, m, w, N});
  return total;
}

/// Number of weight-w Pauli strings on N qubits, 3^w C(N, w).
inline BigInt pauli_weight_count(int w, int N) {
  if (w < 0 || w > N) throw DomainError("pauli_weight_count: require 0 <= w <= N");
  return pow_int(3, w) * binomial(N, w);
}

/// Variance scale of an n-body coupling, a (n-1)! / (4 * 3^(n-1) * N^(n-1)).
inline double coupling_variance(int n, double a_n, int N) {
  if (n < 2 || N < 1 || a_n < 0) throw DomainError("coupling_variance: require n >= 2, N >= 1, a >= 0");
  double v = a_n / 4.0;
  for (int i = 1; i < n; ++i) v *= static_cast<double>(i) / (3.0 * N);
  return v;
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

}  // namespace opgrowth
