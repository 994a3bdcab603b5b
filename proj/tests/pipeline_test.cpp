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
#include <filesystem>
#include <numbers>

#include "gramclust/acceptance.hpp"
#include "gramclust/pipeline.hpp"

namespace gramclust {
namespace {

constexpr double kPi = std::numbers::pi;
const std::string kFixtures = GRAMCLUST_FIXTURES;

std::string matrix_json(const SymMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.rows()) rows.push_back(r);
  return rows.dump();
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(ParseProblemJson, ReadsBothMatrices) {
  const ProblemInput in = parse_problem_json(R"({"A": [[1, -1], [-1, 1]], "B": [[2]]})");
  ASSERT_TRUE(in.a && in.b);
  EXPECT_EQ(in.a->dim(), 2);
  EXPECT_EQ((*in.b)(0, 0), 2.0);
  EXPECT_FALSE(parse_problem_json(R"({"B": [[1]]})").a);
}

TEST(ParseProblemJson, Rejections) {
  EXPECT_EQ(kind_of([] { parse_problem_json("{\"A\": [[1, 2]"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_problem_json("[1, 2]"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_problem_json(R"({"A": [[1, "x"], [1, 1]]})"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_problem_json(R"({"A": [[1, null], [1, 1]]})"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_problem_json(R"({"A": [[1, 0], [0]]})"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_problem_json(R"({"A": []})"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_problem_json(R"({"A": [[1, 0.5], [0.4, 1]]})"); }), ErrorKind::kParseError);
  // Overflowing literals become infinite and are rejected.
  EXPECT_EQ(kind_of([] { parse_problem_json(R"({"A": [[1e400]]})"); }), ErrorKind::kParseError);
}

TEST(ParseProblemJson, TinyAsymmetryIsSymmetrized) {
  const ProblemInput in = parse_problem_json(R"({"A": [[1, -1.0000000001], [-1, 1]]})");
  EXPECT_TRUE(in.a->was_symmetrized());
  EXPECT_EQ((*in.a)(0, 1), (*in.a)(1, 0));
}

TEST(ParseMatrixCsv, SeparatorsAndComments) {
  const SymMatrix m = parse_matrix_csv("# header\n1, 2;3\n\n2 5\t6\r\n3,6,9\n");
  EXPECT_EQ(m.dim(), 3);
  EXPECT_EQ(m(2, 1), 6.0);
}

TEST(ParseMatrixCsv, RejectsNanInfAndGarbage) {
  EXPECT_EQ(kind_of([] { parse_matrix_csv("1, nan\nnan, 1\n"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_matrix_csv("1, inf\ninf, 1\n"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_matrix_csv("1, 2x\n2, 1\n"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_matrix_csv("1, 2\n2\n"); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { parse_matrix_csv(""); }), ErrorKind::kParseError);
}

TEST(ParseMatrixCsv, FixtureFiles) {
  const SymMatrix a = load_matrix_csv(kFixtures + "/a_antipodal.csv");
  const SymMatrix b = load_matrix_csv(kFixtures + "/b_identity.csv");
  EXPECT_EQ(a(0, 1), -1.0);
  EXPECT_EQ(b.dim(), 2);
  EXPECT_EQ(kind_of([] { load_matrix_csv("/nonexistent/file.csv"); }), ErrorKind::kParseError);
}

TEST(RunCluster, AntipodalFixture) {
  const ProblemInput in = load_problem_json(kFixtures + "/antipodal_i2.json");
  CbCache cache;
  const Json r = run_cluster(*in.a, *in.b, RunConfig{}, cache);
  EXPECT_FALSE(r["trivial"].get<bool>());
  EXPECT_DOUBLE_EQ(r["rounding"]["best_value"].get<double>(), 2.0);
  EXPECT_NEAR(r["certified_interval"][1].get<double>(), 2.0, 1e-9);
  EXPECT_NEAR(r["sdp"]["value"].get<double>(), 4.0, 1e-9);
  EXPECT_NEAR(r["ball"]["r2"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(r["cb"]["c_estimate"].get<double>(), 1 / kPi, 1e-12);
  const auto sigma = r["rounding"]["best_sigma"];
  EXPECT_NE(sigma[0], sigma[1]);
  for (const auto& l : sigma) EXPECT_TRUE(l == 1 || l == 2);
  EXPECT_EQ(r["approximation_factor"]["label"], "guaranteed");
  EXPECT_TRUE(r.contains("hardness"));
}

TEST(RunCluster, ZeroMatrixGivesZeroReport) {
  const ProblemInput in = load_problem_json(kFixtures + "/zero_a.json");
  CbCache cache;
  const Json r = run_cluster(*in.a, *in.b, RunConfig{}, cache);
  EXPECT_EQ(r["sdp"]["value"].get<double>(), 0.0);
  EXPECT_EQ(r["rounding"]["best_value"].get<double>(), 0.0);
  EXPECT_EQ(r["certified_interval"][0].get<double>(), 0.0);
  EXPECT_EQ(r["certified_interval"][1].get<double>(), 0.0);
}

TEST(RunCluster, DegenerateBGivesTrivialReport) {
  const ProblemInput in = load_problem_json(kFixtures + "/degenerate_b.json");
  CbCache cache;
  const Json r = run_cluster(*in.a, *in.b, RunConfig{}, cache);
  EXPECT_TRUE(r["trivial"].get<bool>());
  EXPECT_EQ(r["rounding"]["best_value"].get<double>(), 0.0);
  EXPECT_EQ(r["rounding"]["best_sigma"], Json::array({1, 1}));
  EXPECT_EQ(r["certified_interval"], Json::array({0.0, 0.0}));
}

TEST(RunCluster, ValidationErrors) {
  CbCache cache;
  const SymMatrix i2 = SymMatrix::identity(2);
  EXPECT_EQ(kind_of([&] { run_cluster(i2, i2, RunConfig{}, cache); }), ErrorKind::kNotCentered);
  const SymMatrix indefinite = SymMatrix::from_rows({{1, 2}, {2, 1}});
  EXPECT_EQ(kind_of([&] { run_cluster(indefinite, i2, RunConfig{}, cache); }), ErrorKind::kNotPSD);
  const SymMatrix a = SymMatrix::from_rows({{1, -1}, {-1, 1}});
  EXPECT_EQ(kind_of([&] { run_cluster(a, indefinite, RunConfig{}, cache); }), ErrorKind::kNotPSD);
}

TEST(RunCluster, DeterministicAndThreadIndependent) {
  const SymMatrix a = random_centered_psd(9, 3);
  const SymMatrix b = random_psd(3, 3, 3);
  RunConfig cfg;
  cfg.seed = 17;
  CbCache c1, c2, c3;
  const std::string first = run_cluster(a, b, cfg, c1).dump(2);
  EXPECT_EQ(first, run_cluster(a, b, cfg, c2).dump(2));
  cfg.threads = 3;
  EXPECT_EQ(first, run_cluster(a, b, cfg, c3).dump(2));
}

class ClusterInterval : public ::testing::TestWithParam<int> {};

TEST_P(ClusterInterval, IntervalBracketsTheOptimum) {
  const int i = GetParam();
  const SymMatrix a = random_centered_psd(5 + i % 4, 20, static_cast<std::uint64_t>(i));
  const SymMatrix b = random_psd(2 + i % 2, 2 + i % 2, 21, static_cast<std::uint64_t>(i));
  CbCache cache;
  RunConfig cfg;
  cfg.trials = 20;
  const Json r = run_cluster(a, b, cfg, cache);
  const double lo = r["certified_interval"][0].get<double>();
  const double hi = r["certified_interval"][1].get<double>();
  const double opt = brute_force_clust(a, b).value;
  EXPECT_TRUE(r["interval_consistent"].get<bool>());
  EXPECT_LE(lo, opt + 1e-9 * std::max(1.0, opt));
  EXPECT_LE(opt, hi * (1 + 1e-6));
}

INSTANTIATE_TEST_SUITE_P(Random, ClusterInterval, ::testing::Range(0, 10));

TEST(RunAnalyzeB, Examples) {
  CbCache cache;
  const Json c1 = run_analyze_b(b_c_matrix(1.0), RunConfig{}, cache);
  EXPECT_NEAR(c1["ratio"].get<double>(), 16 * kPi / 27, 1e-6);
  const Json quarter = run_analyze_b(b_c_matrix(0.25), RunConfig{}, cache);
  EXPECT_EQ(quarter["cb"]["active"].size(), 2u);
  const Json i2 = run_analyze_b(SymMatrix::identity(2), RunConfig{}, cache);
  EXPECT_NEAR(i2["ratio"].get<double>(), kPi / 2, 1e-9);
  for (const char* key : {"r2", "c_of_b", "ratio", "ball", "cb", "hardness"}) EXPECT_TRUE(c1.contains(key)) << key;
  EXPECT_TRUE(c1["hardness"].contains("mu"));
  EXPECT_TRUE(c1["hardness"].contains("dictatorship_objective"));
}

TEST(RunAnalyzeB, DegenerateAndInvalid) {
  CbCache cache;
  const Json r = run_analyze_b(SymMatrix::from_rows({{1, 1}, {1, 1}}), RunConfig{}, cache);
  EXPECT_TRUE(r["trivial"].get<bool>());
  EXPECT_EQ(kind_of([&] { run_analyze_b(SymMatrix::from_rows({{0, 1}, {1, 0}}), RunConfig{}, cache); }),
            ErrorKind::kNotPSD);
}

TEST(CbCache, KeyDependsOnBAndConfig) {
  SearchConfig cfg;
  const auto k1 = CbCache::key(SymMatrix::identity(3), cfg);
  EXPECT_EQ(k1, CbCache::key(SymMatrix::identity(3), cfg));
  EXPECT_NE(k1, CbCache::key(SymMatrix::diagonal({1, 1, 2}), cfg));
  SearchConfig other = cfg;
  other.mc_samples = 1000;
  EXPECT_NE(k1, CbCache::key(SymMatrix::identity(3), other));
  other = cfg;
  other.threads = 8;  // threads never change the answer
  EXPECT_EQ(k1, CbCache::key(SymMatrix::identity(3), other));
}

TEST(CbCache, MemoryAndDiskRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "gramclust_cache_test";
  std::filesystem::remove_all(dir);
  const SymMatrix b = random_psd(3, 3, 8);
  bool hit = true;
  SearchResult first;
  {
    CbCache cache(dir.string());
    first = cache.get(b, SearchConfig{}, &hit);
    EXPECT_FALSE(hit);
    cache.get(b, SearchConfig{}, &hit);
    EXPECT_TRUE(hit);
  }
  CbCache fresh(dir.string());
  const SearchResult again = fresh.get(b, SearchConfig{}, &hit);
  EXPECT_TRUE(hit);
  EXPECT_EQ(again.c_estimate, first.c_estimate);
  EXPECT_EQ(again.best.active, first.best.active);
  EXPECT_LE((again.best.directions - first.best.directions).cwiseAbs().maxCoeff(), 1e-15);
  std::filesystem::remove_all(dir);
}

TEST(RunOracle, BothOracles) {
  const ProblemInput in = parse_problem_json(R"({"A": [[1, -1], [-1, 1]], "B": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})");
  const Json r = run_oracle(in, 360, kMaxOracleStates, RunConfig{});
  EXPECT_DOUBLE_EQ(r["clust"]["value"].get<double>(), 2.0);
  EXPECT_NEAR(r["c3"]["c_of_b"].get<double>(), 9 / (8 * kPi), 1e-3);
  EXPECT_EQ(kind_of([] { run_oracle(ProblemInput{}, 360, 1e6, RunConfig{}); }), ErrorKind::kParseError);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::kParseError), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kNotCentered), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kNotPSD), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kInfeasible), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kDegenerateB), 3);
}

TEST(Fixtures, GoodFixturesPass) {
  for (const char* name : {"antipodal_i2.json", "zero_a.json", "degenerate_b.json"})
    EXPECT_TRUE(check_fixture(kFixtures + "/" + name, AcceptanceOptions{}).pass) << name;
}

TEST(Fixtures, BadFixturesFail) {
  for (const char* name : {"truncated.json", "asymmetric.json", "not_centered.json", "not_psd.json"})
    EXPECT_FALSE(check_fixture(kFixtures + "/bad/" + name, AcceptanceOptions{}).pass) << name;
}

TEST(Fixtures, BcFilesAnalyze) {
  CbCache cache;
  for (double c : {0.25, 0.5, 1.0, 2.0, 5.0}) {
    char name[64];
    std::snprintf(name, sizeof(name), "/bc/b_c_%g.json", c);
    const ProblemInput in = load_problem_json(kFixtures + name);
    const Json r = run_analyze_b(*in.b, RunConfig{}, cache);
    EXPECT_NEAR(r["ratio"].get<double>(), formula_bc(c).ratio, 0.01 * formula_bc(c).ratio) << c;
  }
}

TEST(Acceptance, QuickSuitePasses) {
  AcceptanceOptions opt;
  opt.quick = true;
  for (const auto& r : run_acceptance(opt)) EXPECT_TRUE(r.pass) << format_result(r, true);
}

}  // namespace
}  // namespace gramclust
