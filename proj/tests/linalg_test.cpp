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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "treexp/error.hpp"
#include "treexp/linalg.hpp"

namespace treexp {
namespace {

Matrix random_matrix(std::mt19937_64& rng, int n, double diagonal_boost) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    m(i, i) += diagonal_boost;
  }
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  }
  return d;
}

// Rebuilds P A from packed factors: row i of L U equals row perm[i] of A.
Matrix reconstruct(const LUFactors& f) {
  const int n = f.size();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k <= std::min(i, j); ++k) {
        const double l = k == i ? 1.0 : f.lu(i, k);
        s += l * f.lu(k, j);
      }
      out(i, j) = s;
    }
  }
  return out;
}

TEST(LuFactor, Identity) {
  const LUFactors f = lu_factor(Matrix::Identity(3));
  EXPECT_EQ(f.sign, 1);
  EXPECT_FALSE(f.singular);
  EXPECT_EQ(max_abs_diff(f.lu, Matrix::Identity(3)), 0.0);
}

TEST(LuFactor, PermutationSwapsOnce) {
  const LUFactors f = lu_factor(Matrix{{0, 1}, {1, 0}});
  EXPECT_EQ(f.sign, -1);
  EXPECT_EQ(f.perm, (std::vector<int>{1, 0}));
}

TEST(LuFactor, ReconstructsRandomMatrix) {
  std::mt19937_64 rng(5);
  const Matrix a = random_matrix(rng, 5, 0.0);
  const LUFactors f = lu_factor(a);
  const Matrix pa = reconstruct(f);
  Matrix permuted(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) permuted(i, j) = a(f.perm[i], j);
  }
  double norm = 0.0, err = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      norm += a(i, j) * a(i, j);
      err += std::pow(pa(i, j) - permuted(i, j), 2);
    }
  }
  EXPECT_LE(std::sqrt(err / norm), 1e-10);
}

TEST(LuFactor, SingularIsFlaggedNotThrown) {
  const LUFactors f = lu_factor(Matrix{{1, 2}, {2, 4}});
  EXPECT_TRUE(f.singular || f.pivot(1) == 0.0);
}

TEST(LuFactor, NonSquareThrows) {
  EXPECT_THROW(lu_factor(Matrix(2, 3)), DimensionError);
  EXPECT_THROW(determinant(Matrix(3, 2)), DimensionError);
  EXPECT_THROW(sign_log_determinant(Matrix(1, 2)), DimensionError);
}

TEST(Determinant, Examples) {
  EXPECT_EQ(determinant(Matrix::Identity(4)), 1.0);
  EXPECT_NEAR(determinant(Matrix{{1, 2}, {3, 4}}), -2.0, 1e-15);
  EXPECT_EQ(determinant(Matrix{{1, 2}, {2, 4}}), 0.0);
  EXPECT_EQ(determinant(Matrix{{0, 0}, {0, 0}}), 0.0);
}

TEST(SignLogDeterminant, Examples) {
  const SignedLogDet id = sign_log_determinant(Matrix::Identity(3));
  EXPECT_EQ(id.sign, 1);
  EXPECT_EQ(id.log_abs, 0.0);
  Matrix two = Matrix::Identity(10);
  for (int i = 0; i < 10; ++i) two(i, i) = 2.0;
  const SignedLogDet d = sign_log_determinant(two);
  EXPECT_EQ(d.sign, 1);
  EXPECT_NEAR(d.log_abs, 10.0 * std::log(2.0), 1e-13);
  const SignedLogDet s = sign_log_determinant(Matrix{{1, 2}, {2, 4}});
  EXPECT_EQ(s.sign, 0);
  EXPECT_TRUE(std::isinf(s.log_abs) && s.log_abs < 0);
  const SignedLogDet neg = sign_log_determinant(Matrix{{1, 2}, {3, 4}});
  EXPECT_EQ(neg.sign, -1);
  EXPECT_NEAR(neg.log_abs, std::log(2.0), 1e-14);
}

TEST(SignLogDeterminant, AgreesWithDeterminant) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix m = random_matrix(rng, 2 + t % 6, 0.5);
    const double det = determinant(m);
    const SignedLogDet sd = sign_log_determinant(m);
    EXPECT_NEAR(sd.sign * std::exp(sd.log_abs) / det, 1.0, 1e-10);
  }
}

TEST(Determinant, RowPermutationFlipsSign) {
  std::mt19937_64 rng(13);
  const Matrix a = random_matrix(rng, 5, 1.0);
  std::vector<int> p(5);
  std::iota(p.begin(), p.end(), 0);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(p.begin(), p.end(), rng);
    Matrix pa(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) pa(i, j) = a(p[i], j);
    }
    int inversions = 0;
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) inversions += p[i] > p[j];
    }
    const double sign = inversions % 2 == 0 ? 1.0 : -1.0;
    EXPECT_NEAR(determinant(pa) / (sign * determinant(a)), 1.0, 1e-12);
  }
}

TEST(Inverse, Examples) {
  EXPECT_EQ(max_abs_diff(inverse(Matrix::Identity(3)), Matrix::Identity(3)),
            0.0);
  EXPECT_EQ(max_abs_diff(inverse(Matrix{{2, 0}, {0, 4}}),
                         Matrix{{0.5, 0}, {0, 0.25}}),
            0.0);
}

TEST(Inverse, MultipliesBackToIdentity) {
  std::mt19937_64 rng(17);
  const Matrix a = random_matrix(rng, 6, 3.0);
  EXPECT_LE(max_abs_diff(a * inverse(a), Matrix::Identity(6)), 1e-8);
  EXPECT_LE(max_abs_diff(inverse(inverse(a)), a), 1e-6);
}

TEST(Inverse, TransposedVariantMatches) {
  std::mt19937_64 rng(19);
  const Matrix a = random_matrix(rng, 4, 2.0);
  const LUFactors f = lu_factor(a);
  EXPECT_EQ(max_abs_diff(inverse_transposed(f), inverse(f).transposed()), 0.0);
}

TEST(Inverse, SingularThrows) {
  EXPECT_THROW(inverse(Matrix{{1, 2}, {2, 4}}), SingularError);
  EXPECT_THROW(inverse(Matrix{{1e-301, 0}, {0, 1}}), SingularError);
}

}  // namespace
}  // namespace treexp
