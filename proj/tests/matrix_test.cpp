// Copyright 2026 The gramclust Authors.
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

#include <gtest/gtest.h>

#include <cmath>

#include "gramclust/matrix.hpp"

namespace gramclust {
namespace {

TEST(SymMatrix, SmallAsymmetryIsSymmetrized) {
  const SymMatrix m = SymMatrix::from_rows({{1.0, 0.5 + 4e-10}, {0.5, 2.0}});
  EXPECT_TRUE(m.was_symmetrized());
  EXPECT_DOUBLE_EQ(m(0, 1), m(1, 0));
  EXPECT_NEAR(m(0, 1), 0.5 + 2e-10, 1e-15);
}

TEST(SymMatrix, LargeAsymmetryIsRejected) {
  try {
    SymMatrix::from_rows({{1.0, 0.5}, {0.49, 2.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
  }
}

TEST(SymMatrix, RejectsNonFiniteAndRagged) {
  EXPECT_THROW(SymMatrix::from_rows({{1.0, NAN}, {NAN, 1.0}}), Error);
  EXPECT_THROW(SymMatrix::from_rows({{1.0, INFINITY}, {INFINITY, 1.0}}), Error);
  EXPECT_THROW(SymMatrix::from_rows({{1.0, 0.0}, {0.0}}), Error);
  EXPECT_THROW(SymMatrix::from_rows({}), Error);
}

TEST(SymMatrix, Permuted) {
  const SymMatrix m = SymMatrix::diagonal({1.0, 2.0, 3.0});
  const SymMatrix p = m.permuted({2, 0, 1});
  EXPECT_DOUBLE_EQ(p(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(p(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(p(1, 1), 3.0);
}

TEST(Validate, Psd) {
  EXPECT_TRUE(validate_psd(SymMatrix::identity(3)));
  EXPECT_TRUE(validate_psd(SymMatrix::from_rows({{1, 1}, {1, 1}})));
  EXPECT_FALSE(validate_psd(SymMatrix::from_rows({{1, 2}, {2, 1}})));
  // A tiny negative eigenvalue within tolerance is accepted.
  EXPECT_TRUE(validate_psd(SymMatrix::diagonal({1.0, -1e-12})));
}

TEST(Validate, Centered) {
  EXPECT_TRUE(validate_centered(SymMatrix::from_rows({{1, -1}, {-1, 1}})));
  EXPECT_FALSE(validate_centered(SymMatrix::identity(2)));
  EXPECT_TRUE(validate_centered(random_centered_psd(6, 3)));
}

TEST(GramFactor, ReproducesB) {
  const SymMatrix b = random_psd(5, 3, 9);
  const GramFactor g = gram_factorize(b);
  EXPECT_EQ(g.k, 5);
  EXPECT_EQ(g.ambient_dim, 3);
  EXPECT_LE((g.gram() - b.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GramFactor, RankOneAndZero) {
  const GramFactor g = gram_factorize(SymMatrix::from_rows({{1, 1}, {1, 1}}));
  EXPECT_EQ(g.ambient_dim, 1);
  EXPECT_NEAR((g.vector(0) - g.vector(1)).norm(), 0.0, 1e-12);
  const GramFactor z = gram_factorize(SymMatrix(Matrix::Zero(3, 3)));
  EXPECT_EQ(z.ambient_dim, 0);
}

TEST(GramFactor, RejectsIndefinite) {
  try {
    gram_factorize(SymMatrix::from_rows({{1, 2}, {2, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotPSD);
  }
}

TEST(GramFactor, Padded) {
  const GramFactor g = gram_factorize(SymMatrix::identity(2));
  const Matrix p = g.padded(4);
  EXPECT_EQ(p.cols(), 4);
  EXPECT_LE((p * p.transpose() - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(RandomCenteredPsd, Properties) {
  for (int n = 2; n <= 8; ++n) {
    const SymMatrix a = random_centered_psd(n, 5, static_cast<std::uint64_t>(n));
    EXPECT_TRUE(validate_psd(a));
    EXPECT_NEAR(a.matrix().sum(), 0.0, 1e-10);
  }
  EXPECT_THROW(random_centered_psd(1, 0), Error);
}

TEST(ContentHash, SensitiveToEntriesAndShape) {
  const SymMatrix a = SymMatrix::identity(2);
  EXPECT_EQ(content_hash(a), content_hash(SymMatrix::identity(2)));
  EXPECT_NE(content_hash(a), content_hash(SymMatrix::identity(3)));
  EXPECT_NE(content_hash(a), content_hash(SymMatrix::diagonal({1.0, 1.0 + 1e-15})));
}

TEST(ErrorKind, Names) {
  EXPECT_STREQ(to_string(ErrorKind::kNotPSD), "NotPSD");
  EXPECT_STREQ(to_string(ErrorKind::kDegenerateB), "DegenerateB");
}

}  // namespace
}  // namespace gramclust
