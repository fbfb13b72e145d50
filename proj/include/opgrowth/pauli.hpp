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

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opgrowth/errors.hpp"

namespace opgrowth {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxPauliQubits = 6;

/// Pauli string on n <= 6 qubits in (x, z) bit form; qubit q carries X if only x_q is set,
/// Z if only z_q, Y if both.
struct PauliString {
  int n = 1;
  std::uint32_t x = 0;
  std::uint32_t z = 0;

  static PauliString parse(std::string_view label) {
    const int n = static_cast<int>(label.size());
    if (n < 1 || n > kMaxPauliQubits) throw DomainError("PauliString: length must be 1..6");
    PauliString p{n, 0, 0};
    for (int q = 0; q < n; ++q) {
      switch (label[q]) {
        case 'I': case '_': break;
        case 'X': p.x |= 1u << q; break;
        case 'Y': p.x |= 1u << q, p.z |= 1u << q; break;
        case 'Z': p.z |= 1u << q; break;
        default: throw DomainError("PauliString: unknown symbol '" + std::string(1, label[q]) + "'");
      }
    }
    return p;
  }

  /// Index in 0..4^n-1 used by pauli_decompose.
  std::uint32_t index() const { return x | (z << n); }
  static PauliString from_index(int n, std::uint32_t idx) {
    const std::uint32_t mask = (1u << n) - 1;
    return {n, idx & mask, (idx >> n) & mask};
  }

  int weight() const { return std::popcount(x | z); }
  bool commutes_with(const PauliString& o) const {
    return (std::popcount((x & o.z) ^ (z & o.x)) & 1) == 0;
  }

  std::string label() const {
    std::string s(n, 'I');
    for (int q = 0; q < n; ++q) {
      const bool bx = (x >> q) & 1, bz = (z >> q) & 1;
      s[q] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
    }
    return s;
  }

  /// Matrix entry <j ^ x| P |j>.
  cplx column_phase(std::uint32_t j) const {
    static constexpr cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int sign = std::popcount(j & z) & 1;
    const cplx ph = ipow[std::popcount(x & z) & 3];
    return sign ? -ph : ph;
  }

  CMatrix matrix() const {
    const Eigen::Index d = Eigen::Index{1} << n;
    CMatrix m = CMatrix::Zero(d, d);
    for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(d); ++j) m(j ^ x, j) = column_phase(j);
    return m;
  }
};

/// c_P = Tr(P^dagger O) / 2^n for all 4^n strings, indexed by PauliString::index.
inline std::vector<cplx> pauli_decompose(const CMatrix& O) {
  const Eigen::Index d = O.rows();
  if (O.cols() != d || d < 2 || (d & (d - 1)) != 0) throw DomainError("pauli_decompose: need a 2^n x 2^n matrix");
  const int n = std::countr_zero(static_cast<std::uint32_t>(d));
  if (n > kMaxPauliQubits) throw DomainError("pauli_decompose: at most 6 qubits");
  const std::uint32_t count = 1u << (2 * n);
  std::vector<cplx> c(count);
  for (std::uint32_t idx = 0; idx < count; ++idx) {
    const PauliString p = PauliString::from_index(n, idx);
    cplx acc = 0;
    for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(d); ++j)
      acc += std::conj(p.column_phase(j)) * O(j ^ p.x, j);
    c[idx] = acc / static_cast<double>(d);
  }
  return c;
}

/// Inverse of pauli_decompose.
inline CMatrix pauli_compose(int n, const std::vector<cplx>& c) {
  if (n < 1 || n > kMaxPauliQubits || c.size() != (std::size_t{1} << (2 * n)))
    throw DomainError("pauli_compose: coefficient count must be 4^n");
  const Eigen::Index d = Eigen::Index{1} << n;
  CMatrix O = CMatrix::Zero(d, d);
  for (std::uint32_t idx = 0; idx < c.size(); ++idx) {
    if (c[idx] == cplx{0}) continue;
    const PauliString p = PauliString::from_index(n, idx);
    for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(d); ++j) O(j ^ p.x, j) += c[idx] * p.column_phase(j);
  }
  return O;
}

}  // namespace opgrowth
