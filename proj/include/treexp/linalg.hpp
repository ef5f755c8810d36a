// Copyright 2026 The treexp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef TREEXP_LINALG_HPP_
#define TREEXP_LINALG_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace treexp {

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows),
        cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  std::span<double> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> data() const { return data_; }

  Matrix transposed() const;
  double max_abs() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Partial-pivoted LU: P*A = L*U with unit-lower L and U packed into `lu`.
// perm[k] is the original row that ended up in row k.
struct LUFactors {
  Matrix lu;
  std::vector<int> perm;
  int sign = 1;          // parity of perm
  bool singular = false;  // some column had no nonzero pivot candidate

  int size() const { return lu.rows(); }
  double pivot(int k) const { return lu(k, k); }
};

struct SignedLogDet {
  int sign;         // -1, 0 or +1
  double log_abs;   // -infinity when sign == 0
};

// Pivot magnitudes at or below this make inverse() throw.
inline constexpr double kSingularPivot = 1e-300;

LUFactors lu_factor(const Matrix& m);
double determinant(const Matrix& m);
double determinant(const LUFactors& f);
SignedLogDet sign_log_determinant(const Matrix& m);
SignedLogDet sign_log_determinant(const LUFactors& f);
Matrix inverse(const Matrix& m);
Matrix inverse(const LUFactors& f);
// (A^{-1})^T without materializing A^{-1}; same error behavior as inverse.
Matrix inverse_transposed(const LUFactors& f);

}  // namespace treexp

#endif  // TREEXP_LINALG_HPP_
