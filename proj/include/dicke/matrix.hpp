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

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/exact_scalar.hpp"

namespace dicke {

/// Dense row-major matrix over a coefficient type.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ScalarTraits<S>::from_int(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
  const S& operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ValidationError("matrix dimension mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t l = 0; l < a.cols_; ++l) {
        const S& x = a(i, l);
        if (ScalarTraits<S>::is_zero(x)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!ScalarTraits<S>::is_zero(b(l, j))) out(i, j) += x * b(l, j);
      }
    return out;
  }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = ScalarTraits<S>::conj((*this)(i, j));
    return out;
  }

  /// max |(M M^dagger - I)_ij|; exactly 0 for exact unitaries.
  double unitarity_defect() const {
    const Matrix p = (*this) * adjoint();
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        S d = p(i, j);
        if (i == j) d -= ScalarTraits<S>::from_int(1);
        if constexpr (ScalarTraits<S>::kExact) {
          if (!d.is_zero()) worst = std::max(worst, std::max(std::abs(d.to_complex()), 1e-300));
        } else {
          worst = std::max(worst, std::abs(d));
        }
      }
    return worst;
  }

  Matrix<Complex> to_complex() const {
    Matrix<Complex> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = ScalarTraits<S>::to_complex((*this)(i, j));
    return out;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> d_;
};

}  // namespace dicke
