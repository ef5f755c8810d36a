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

#include "treexp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "treexp/error.hpp"

namespace treexp {
namespace {

void require_square(const Matrix& m) {
  if (!m.square()) {
    throw DimensionError("expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(static_cast<int>(rows.size())),
      cols_(rows.size() == 0 ? 0 : static_cast<int>(rows.begin()->size())) {
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) {
      throw DimensionError("ragged matrix literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::Identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matrix product shape mismatch");
  }
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (int j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

LUFactors lu_factor(const Matrix& m) {
  require_square(m);
  const int n = m.rows();
  LUFactors f{m, std::vector<int>(n), 1, false};
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  Matrix& a = f.lu;

  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best == 0.0) {
      f.singular = true;
      continue;
    }
    if (p != k) {
      std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(p).begin());
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    const double pivot = a(k, k);
    auto urow = a.row(k);
    for (int i = k + 1; i < n; ++i) {
      auto row = a.row(i);
      const double l = row[k] / pivot;
      row[k] = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) row[j] -= l * urow[j];
    }
  }
  return f;
}

double determinant(const LUFactors& f) {
  if (f.singular) return 0.0;
  double det = f.sign;
  for (int k = 0; k < f.size(); ++k) det *= f.pivot(k);
  return det;
}

double determinant(const Matrix& m) { return determinant(lu_factor(m)); }

SignedLogDet sign_log_determinant(const LUFactors& f) {
  if (f.singular) return {0, -std::numeric_limits<double>::infinity()};
  int sign = f.sign;
  double log_abs = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    const double p = f.pivot(k);
    if (p < 0.0) sign = -sign;
    log_abs += std::log(std::abs(p));
  }
  return {sign, log_abs};
}

SignedLogDet sign_log_determinant(const Matrix& m) {
  return sign_log_determinant(lu_factor(m));
}

Matrix inverse(const LUFactors& f) {
  const int n = f.size();
  for (int k = 0; k < n; ++k) {
    if (f.singular || !(std::abs(f.pivot(k)) > kSingularPivot)) {
      throw SingularError("matrix is singular (pivot " + std::to_string(k) +
                          " underflows)");
    }
  }
  const Matrix& a = f.lu;
  // Solve L U X = P for all right-hand sides at once. Each update is a
  // contiguous row axpy, which vectorizes.
  Matrix x(n, n);
  for (int i = 0; i < n; ++i) x(i, f.perm[i]) = 1.0;
  for (int i = 0; i < n; ++i) {
    auto xi = x.row(i);
    const auto li = a.row(i);
    for (int j = 0; j < i; ++j) {
      const double l = li[j];
      if (l == 0.0) continue;
      const auto xj = x.row(j);
      for (int c = 0; c < n; ++c) xi[c] -= l * xj[c];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    auto xi = x.row(i);
    const auto ui = a.row(i);
    for (int j = i + 1; j < n; ++j) {
      const double u = ui[j];
      if (u == 0.0) continue;
      const auto xj = x.row(j);
      for (int c = 0; c < n; ++c) xi[c] -= u * xj[c];
    }
    const double inv_pivot = 1.0 / ui[i];
    for (int c = 0; c < n; ++c) xi[c] *= inv_pivot;
  }
  return x;
}

Matrix inverse_transposed(const LUFactors& f) { return inverse(f).transposed(); }

Matrix inverse(const Matrix& m) { return inverse(lu_factor(m)); }

}  // namespace treexp
