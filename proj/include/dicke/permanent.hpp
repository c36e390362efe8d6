/**
 * Copyright 2026 The dicke-lqg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/matrix.hpp"

namespace dicke {

inline constexpr std::size_t kMaxPermanentDim = 24;

/**
 * Ryser's formula with Gray-code subset order:
 * per(A) = (-1)^d sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij, O(2^d d).
 */
template <class S>
S permanent(const Matrix<S>& a) {
  const std::size_t d = a.rows();
  if (a.cols() != d) throw ValidationError("permanent of a non-square matrix");
  if (d > kMaxPermanentDim) throw ValidationError("permanent dimension above guard");
  if (d == 0) return ScalarTraits<S>::from_int(1);
  std::vector<S> row_sum(d);
  S total{};
  std::uint64_t gray_prev = 0;
  const std::uint64_t subsets = std::uint64_t{1} << d;
  for (std::uint64_t i = 1; i < subsets; ++i) {
    const std::uint64_t gray = i ^ (i >> 1);
    const std::uint64_t diff = gray ^ gray_prev;
    const int j = __builtin_ctzll(diff);
    const bool added = (gray & diff) != 0;
    for (std::size_t r = 0; r < d; ++r) {
      if (added)
        row_sum[r] += a(r, std::size_t(j));
      else
        row_sum[r] -= a(r, std::size_t(j));
    }
    S prod = row_sum[0];
    for (std::size_t r = 1; r < d; ++r) prod *= row_sum[r];
    if ((__builtin_popcountll(gray) & 1) == (d & 1))
      total += prod;
    else
      total -= prod;
    gray_prev = gray;
  }
  return total;
}

/**
 * <out| U |in> for occupation vectors over the circuit modes:
 * per(U[rows repeated by out, cols repeated by in]) / sqrt(prod in! prod out!).
 */
inline Complex amplitude_by_permanent(const Matrix<Complex>& u, const std::vector<unsigned>& in,
                                      const std::vector<unsigned>& out) {
  if (in.size() != u.cols() || out.size() != u.rows()) throw ValidationError("occupation vector size mismatch");
  std::vector<std::size_t> cols, rows;
  double norm = 1.0;
  for (std::size_t m = 0; m < in.size(); ++m)
    for (unsigned i = 0; i < in[m]; ++i) {
      cols.push_back(m);
      norm *= i + 1;
    }
  for (std::size_t m = 0; m < out.size(); ++m)
    for (unsigned i = 0; i < out[m]; ++i) {
      rows.push_back(m);
      norm *= i + 1;
    }
  if (rows.size() != cols.size()) throw ValidationError("photon numbers of input and output differ");
  Matrix<Complex> sub(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = u(rows[r], cols[c]);
  return permanent(sub) / std::sqrt(norm);
}

}  // namespace dicke
