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

#include "gramclust/acceptance.hpp"
#include "gramclust/ball.hpp"
#include "gramclust/hardness.hpp"

namespace gramclust {
namespace {

LabelDistribution mu_for(const SymMatrix& b, double eps) {
  const GramFactor g = gram_factorize(b);
  return build_mu(min_enclosing_ball(g), g, eps);
}

TEST(BuildMu, IdentityIsUniform) {
  for (double eps : {1e-1, 1e-3}) {
    const LabelDistribution d = mu_for(SymMatrix::identity(3), eps);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.mu(i), 1.0 / 3.0, 1e-9);
  }
}

TEST(BuildMu, TwoBasisVectors) {
  const LabelDistribution d = mu_for(SymMatrix::identity(2), 0.01);
  EXPECT_NEAR(d.p(0), 0.5, 1e-9);
  EXPECT_NEAR(d.mu(0), 0.5, 1e-9);
  EXPECT_NEAR(d.mu(1), 0.5, 1e-9);
}

TEST(BuildMu, BetaRuleAndNormalization) {
  const SymMatrix b = SymMatrix::diagonal({1, 1, 2});
  const LabelDistribution d = mu_for(b, 0.01);
  EXPECT_NEAR(d.beta, 0.01 / (7 * 0.9), 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.mu(i), (1 - d.beta) * d.p(i) + d.beta / 3, 1e-15);
  EXPECT_NEAR(d.mu.sum(), 1.0, 1e-12);
  // Large epsilon caps beta at 1/8.
  EXPECT_EQ(mu_for(b, 100.0).beta, 0.125);
}

TEST(BuildMu, InteriorLabelGetsPositiveMass) {
  Matrix v(3, 2);
  v << -1, 0, 1, 0, 0, 0.1;
  GramFactor g;
  g.k = 3;
  g.ambient_dim = 2;
  g.vectors = v;
  const LabelDistribution d = build_mu(min_enclosing_ball(g), g, 0.05);
  EXPECT_EQ(d.p(2), 0.0);
  EXPECT_GT(d.mu(2), 0.0);
}

TEST(BuildMu, Errors) {
  const GramFactor g = gram_factorize(SymMatrix::from_rows({{1, 1}, {1, 1}}));
  try {
    build_mu(min_enclosing_ball(g), g, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateB);
  }
  const GramFactor h = gram_factorize(SymMatrix::identity(2));
  EXPECT_THROW(build_mu(min_enclosing_ball(h), h, 0.0), Error);
  EXPECT_THROW(build_mu(min_enclosing_ball(h), h, -1.0), Error);
}

TEST(DictatorshipObjective, Examples) {
  LabelDistribution uniform;
  uniform.mu = Vector::Constant(3, 1.0 / 3.0);
  EXPECT_NEAR(dictatorship_objective(SymMatrix::identity(3), uniform), 2.0 / 3.0, 1e-12);
  LabelDistribution single;
  single.mu = Vector::Ones(1);
  EXPECT_EQ(dictatorship_objective(SymMatrix::diagonal({4.0}), single), 0.0);
  const SymMatrix b = SymMatrix::diagonal({1, 1, 2});
  const double v = dictatorship_objective(b, mu_for(b, 0.01));
  EXPECT_GE(v, 0.89);
  EXPECT_LE(v, 0.9 + 1e-12);
}

TEST(DictatorshipObjective, ContinuousAtBetaZero) {
  const SymMatrix b = random_psd(5, 4, 3);
  const GramFactor g = gram_factorize(b);
  const EnclosingBall ball = min_enclosing_ball(g);
  const double r2 = ball.radius_squared();
  for (double eps : {1e-4, 1e-6, 1e-8}) {
    const LabelDistribution d = build_mu(ball, g, eps);
    EXPECT_GE(dictatorship_objective(g, d.mu), r2 - eps);
  }
  EXPECT_NEAR(dictatorship_objective(g, ball.weights), r2, 1e-6);
}

class HardnessProperties : public ::testing::TestWithParam<int> {};

TEST_P(HardnessProperties, SpreadAtLeastRadiusSquaredMinusEps) {
  const int i = GetParam();
  const SymMatrix b = random_psd(2 + i % 6, 1 + i % 4, 17, static_cast<std::uint64_t>(i));
  const GramFactor g = gram_factorize(b);
  const EnclosingBall ball = min_enclosing_ball(g);
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    const LabelDistribution d = build_mu(ball, g, eps);
    EXPECT_GE(dictatorship_objective(b, d), ball.radius_squared() - eps);
    EXPECT_LE(dictatorship_objective(b, d), ball.radius_squared() + 1e-7);
    EXPECT_GT(d.mu.minCoeff(), 0.0);
  }
}

TEST_P(HardnessProperties, BasisInvariants) {
  const int i = GetParam();
  const LabelDistribution d = random_distribution(2 + i % 7, 18, static_cast<std::uint64_t>(i));
  EXPECT_EQ(check_basis_invariants(d), "");
  const OrthonormalBasis basis = build_basis(d);
  for (int j = 1; j < basis.k; ++j) EXPECT_NEAR(basis.table.row(j).dot(d.mu), 0.0, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Random, HardnessProperties, ::testing::Range(0, 50));

TEST(BuildBasis, TwoLabelsUniform) {
  LabelDistribution d;
  d.mu = Vector::Constant(2, 0.5);
  const OrthonormalBasis basis = build_basis(d);
  EXPECT_NEAR(std::abs(basis.table(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(basis.table(1, 0), -basis.table(1, 1), 1e-12);
}

TEST(BuildBasis, ThreeLabelsUniformAndPointMassLimit) {
  LabelDistribution d;
  d.mu = Vector::Constant(3, 1.0 / 3.0);
  EXPECT_EQ(check_basis_invariants(d), "");
  // mu close to e_1 makes the reflection nearly trivial.
  d.mu = Vector(3);
  d.mu << 1 - 2e-6, 1e-6, 1e-6;
  EXPECT_EQ(check_basis_invariants(d, 1e-8, 1e-8), "");
}

TEST(BuildBasis, ZeroMassIsAnError) {
  LabelDistribution d;
  d.mu = Vector(3);
  d.mu << 0.5, 0.5, 0.0;
  try {
    build_basis(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kZeroMass);
  }
}

}  // namespace
}  // namespace gramclust
