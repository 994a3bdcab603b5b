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
#include <numbers>

#include "gramclust/ball.hpp"
#include "gramclust/conic.hpp"
#include "gramclust/oracle.hpp"

namespace gramclust {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(SearchCb, IdentityTwoIsHalflines) {
  const SearchResult r = search_cb(SymMatrix::identity(2));
  EXPECT_NEAR(r.c_estimate, 1 / kPi, 1e-12);
  EXPECT_EQ(r.best.ell(), 2);
  EXPECT_TRUE(r.value.exact);
  EXPECT_FALSE(r.heuristic);
}

TEST(SearchCb, IdentityThreeIsPropeller) {
  const SearchResult r = search_cb(SymMatrix::identity(3));
  EXPECT_NEAR(r.c_estimate, 9 / (8 * kPi), 1e-7);
  ASSERT_EQ(r.best.ell(), 3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.value.masses(j), 1.0 / 3.0, 1e-5);
}

TEST(SearchCb, SmallThirdWeightLeavesThirdCellEmpty) {
  const SearchResult r = search_cb(SymMatrix::diagonal({1, 1, 0.25}));
  EXPECT_NEAR(r.c_estimate, 1 / kPi, 1e-9);
  EXPECT_EQ(r.best.ell(), 2);
  EXPECT_EQ(r.best.active, (std::vector<int>{0, 1}));
}

TEST(SearchCb, ZeroThirdWeightReducesToTwoLabels) {
  const SymMatrix b = SymMatrix::diagonal({1, 1, 0});
  EXPECT_NEAR(search_cb(b).c_estimate, 1 / kPi, 1e-9);
  EXPECT_NEAR(brute_force_c3(b, 360), 1 / kPi, 1e-3);
}

TEST(SearchCb, BcFamilyMatchesClosedForm) {
  for (double c : {0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0}) {
    const SearchResult r = search_cb(SymMatrix::diagonal({1, 1, c}));
    EXPECT_NEAR(r.c_estimate, formula_bc(c).c_of_b, 1e-6 * formula_bc(c).c_of_b) << c;
  }
}

TEST(SearchCb, IdentityFourFindsThreeCellPropeller) {
  // Four labels of equal weight: the three-cell propeller beats every
  // four-cell partition found, so C(I_4) = C(I_3).
  SearchConfig cfg;
  const SearchResult r = search_cb(SymMatrix::identity(4), cfg);
  EXPECT_NEAR(r.c_estimate, 9 / (8 * kPi), 1e-6);
  EXPECT_EQ(r.best.ell(), 3);
  EXPECT_LE(r.fp_residual, std::max(cfg.fp_tol, 3 * r.value.mc_stderr));
}

TEST(SearchCb, FiveLabelsAreHeuristic) {
  SearchConfig cfg;
  cfg.max_net_points = 3;
  cfg.search_samples = 8000;
  cfg.mc_samples = 20000;
  const SymMatrix b = random_psd(5, 5, 4);
  const SearchResult r = search_cb(b, cfg);
  EXPECT_TRUE(r.heuristic);
  EXPECT_FALSE(r.net_exhaustive);
  EXPECT_GT(r.c_estimate, 0.0);
  EXPECT_LE(r.c_estimate, radius_squared(b) + 3 * r.value.psi_stderr);
}

TEST(SearchCb, DegenerateAndTooSmall) {
  try {
    search_cb(SymMatrix::from_rows({{1, 1}, {1, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateB);
  }
  EXPECT_THROW(search_cb(SymMatrix::identity(1)), Error);
  EXPECT_THROW(search_cb(SymMatrix(Matrix::Zero(3, 3))), Error);
  EXPECT_THROW(search_cb(SymMatrix::from_rows({{1, 2}, {2, 1}})), Error);
}

TEST(SearchCb, NetBookkeeping) {
  const SearchResult r = search_cb(SymMatrix::identity(3));
  EXPECT_NEAR(r.epsilon, 1e-3 * 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.net_delta, r.epsilon / (8 * std::sqrt(3.0) * 3.0), 1e-18);
  EXPECT_GT(r.log10_net_points_required, 0.0);
  EXPECT_GT(r.candidates, 0);
  SearchConfig cfg;
  cfg.net_delta_override = 0.5;
  EXPECT_EQ(search_cb(SymMatrix::identity(3), cfg).net_delta, 0.5);
}

class SearchProperties : public ::testing::TestWithParam<int> {};

TEST_P(SearchProperties, BoundedByRadiusSquared) {
  const int i = GetParam();
  const SymMatrix b = random_psd(3, 1 + i % 3, 77, static_cast<std::uint64_t>(i));
  const SearchResult r = search_cb(b);
  EXPECT_LE(r.c_estimate, radius_squared(b) + 1e-6);
  EXPECT_GE(r.c_estimate, 0.0);
}

TEST_P(SearchProperties, ScaleEquivariance) {
  const int i = GetParam();
  const SymMatrix b = random_psd(3, 3, 78, static_cast<std::uint64_t>(i));
  const double base = search_cb(b).c_estimate;
  for (double t : {0.5, 3.0}) EXPECT_NEAR(search_cb(b.scaled(t)).c_estimate, t * base, 0.01 * t * base);
}

TEST_P(SearchProperties, PermutationEquivariance) {
  const int i = GetParam();
  const SymMatrix b = random_psd(3, 3, 79, static_cast<std::uint64_t>(i));
  const SearchResult x = search_cb(b);
  const std::vector<int> perm{2, 0, 1};
  const SearchResult y = search_cb(b.permuted(perm));
  EXPECT_NEAR(x.c_estimate, y.c_estimate, 0.01 * x.c_estimate);
  // The active label sets correspond under the permutation.
  std::vector<int> mapped;
  for (int l : x.best.active) mapped.push_back(perm[l]);
  std::sort(mapped.begin(), mapped.end());
  std::vector<int> other = y.best.active;
  std::sort(other.begin(), other.end());
  EXPECT_EQ(mapped, other);
}

TEST_P(SearchProperties, AgreesWithRayGridOracle) {
  const int i = GetParam();
  const SymMatrix b = random_psd(3, 3, 80, static_cast<std::uint64_t>(i));
  EXPECT_NEAR(search_cb(b).c_estimate, brute_force_c3(b, 360), 0.01 * brute_force_c3(b, 360));
}

TEST_P(SearchProperties, FixedPointAndMomentSum) {
  const int i = GetParam();
  const SymMatrix b = random_psd(3, 2 + i % 2, 81, static_cast<std::uint64_t>(i));
  SearchConfig cfg;
  const SearchResult r = search_cb(b, cfg);
  EXPECT_LE(r.fp_residual, std::max(cfg.fp_tol, 3 * r.value.mc_stderr));
  Vector sum = Vector::Zero(r.best.cone_dim());
  for (const auto& z : r.value.moments) sum += z;
  EXPECT_LE(sum.norm(), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Random, SearchProperties, ::testing::Range(0, 20));

TEST(SearchCb, FourLabelsDeterministicAcrossThreads) {
  const SymMatrix b = random_psd(4, 4, 82);
  SearchConfig one;
  one.max_net_points = 6;
  SearchConfig many = one;
  many.threads = 3;
  const SearchResult x = search_cb(b, one);
  const SearchResult y = search_cb(b, many);
  EXPECT_EQ(x.c_estimate, y.c_estimate);
  EXPECT_EQ(x.best.active, y.best.active);
  EXPECT_LE(x.fp_residual, std::max(one.fp_tol, 3 * x.value.mc_stderr));
}

TEST(SearchCb, FourLabelsMonteCarloInvariants) {
  // Nearly equal weights: the optimum may drop a label, so compare against
  // the best three-label sub-problem.
  const SymMatrix b = SymMatrix::diagonal({1.0, 1.1, 1.2, 1.3});
  SearchConfig cfg;
  cfg.max_net_points = 6;
  const SearchResult r = search_cb(b, cfg);
  EXPECT_LE(r.c_estimate, radius_squared(b) + 3 * r.value.psi_stderr);
  Vector sum = Vector::Zero(r.best.cone_dim());
  for (const auto& z : r.value.moments) sum += z;
  EXPECT_LE(sum.norm(), 1e-9 + 3 * r.value.mc_stderr);
  EXPECT_LE(r.fp_residual, std::max(cfg.fp_tol, 3 * r.value.mc_stderr));
  // No worse than the best three-label sub-problem, up to sampling error.
  const double three = search_cb(SymMatrix::diagonal({1.1, 1.2, 1.3})).c_estimate;
  EXPECT_GE(r.c_estimate, three * (1 - 1e-9) - 3 * r.value.psi_stderr);
}

}  // namespace
}  // namespace gramclust
