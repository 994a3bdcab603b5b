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

#ifndef GRAMCLUST_ACCEPTANCE_HPP_
#define GRAMCLUST_ACCEPTANCE_HPP_

// The end-to-end acceptance suite. Each criterion returns a verdict plus an
// expected-vs-measured table; the acceptance binary and `selftest` print it.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gramclust/ball.hpp"
#include "gramclust/conic.hpp"
#include "gramclust/hardness.hpp"
#include "gramclust/matrix.hpp"
#include "gramclust/oracle.hpp"
#include "gramclust/pipeline.hpp"
#include "gramclust/rounding.hpp"
#include "gramclust/sdp.hpp"

namespace gramclust {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<std::string> warnings;
  std::vector<std::string> table;  // expected-vs-measured lines
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  bool quick = false;
  int threads = 1;
  std::uint64_t seed = 2026;
};

struct OracleInstance {
  SymMatrix a;
  SymMatrix b;
};

/// Fixed random instances: n cycles through 4..10, k through {2, 3}.
inline std::vector<OracleInstance> oracle_instances(int count, std::uint64_t seed) {
  std::vector<OracleInstance> out;
  for (int i = 0; i < count; ++i) {
    const int n = 4 + i % 7;
    const int k = 2 + i % 2;
    out.push_back({random_centered_psd(n, seed, static_cast<std::uint64_t>(i)),
                   random_psd(k, k, seed, 1000 + static_cast<std::uint64_t>(i))});
  }
  return out;
}

/// Random PSD B with k cycling through {2, 3, 4}; every fourth one has a
/// rank-deficient Gram factor.
inline std::vector<SymMatrix> structural_b_set(int count, std::uint64_t seed) {
  std::vector<SymMatrix> out;
  for (int i = 0; i < count; ++i) {
    const int k = 2 + i % 3;
    const int dim = (i % 4 == 3) ? std::max(1, k - 1) : k;
    out.push_back(random_psd(k, dim, seed, 2000 + static_cast<std::uint64_t>(i)));
  }
  return out;
}

namespace detail {

inline std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a);
  return buf;
}

template <typename... Args>
std::string fmtn(const char* pattern, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult criterion_bc_table(const AcceptanceOptions& opt) {
  CriterionResult r{1, "B_c regression table", true};
  r.budget_seconds = 120.0;
  SearchConfig cfg;
  cfg.threads = opt.threads;
  const auto rows = verify_bc_family({0.25, 0.5, 1.0, 2.0, 5.0}, cfg);
  r.table.push_back("     c   R2(exp)   R2(got)    C(exp)    C(got) ratio(exp) ratio(got) cells");
  for (const auto& row : rows) {
    r.table.push_back(detail::fmtn("%6.2f %9.6f %9.6f %9.6f %9.6f %10.6f %10.6f %5d %s", row.c,
                                   row.expected.r2, row.r2, row.expected.c_of_b, row.c_of_b,
                                   row.expected.ratio, row.ratio, row.active_cells,
                                   row.pass ? "ok" : "FAIL"));
    r.pass = r.pass && row.pass;
  }
  const double pi = std::numbers::pi;
  const double r1 = formula_bc(1.0).ratio;
  const bool anchor = std::abs(r1 - 16.0 * pi / 27.0) <= 1e-9;
  r.table.push_back(detail::fmtn("formula ratio(1) = %.9f, 16pi/27 = %.9f", r1, 16.0 * pi / 27.0));
  // Both branches of C(B_c) at c = 1/2.
  const double c = 0.5;
  const double upper_branch = (2 * c + 1) * (2 * c + 1) / (8 * pi * c);
  const double lower_branch = 1.0 / pi;
  const double r2_half = (1 + c) * (1 + c) / (2 + 4 * c);
  const bool branches = std::abs(upper_branch - lower_branch) <= 1e-9 &&
                        std::abs(r2_half / upper_branch - 9 * pi / 16) <= 1e-9 &&
                        std::abs(formula_bc(0.5).ratio - 9 * pi / 16) <= 1e-9;
  r.table.push_back(detail::fmtn("c=1/2 branches: %.12f vs %.12f, ratio %.9f vs 9pi/16 %.9f",
                                 upper_branch, lower_branch, r2_half / upper_branch, 9 * pi / 16));
  r.pass = r.pass && anchor && branches;
  return r;
}

inline CriterionResult criterion_grothendieck(const AcceptanceOptions& opt) {
  CriterionResult r{2, "Grothendieck anchor B = I_2", true};
  r.budget_seconds = 30.0;
  SearchConfig cfg;
  cfg.threads = opt.threads;
  const SymMatrix b = SymMatrix::identity(2);
  const SearchResult found = search_cb(b, cfg);
  const double r2 = radius_squared(b);
  const double pi = std::numbers::pi;
  const double ratio = r2 / found.c_estimate;
  r.table.push_back(detail::fmtn("C(I_2): expected %.9f got %.9f", 1 / pi, found.c_estimate));
  r.table.push_back(detail::fmtn("ratio : expected %.9f got %.9f", pi / 2, ratio));
  r.pass = detail::rel_err(found.c_estimate, 1 / pi) <= 0.01 && detail::rel_err(ratio, pi / 2) <= 0.01;
  return r;
}

/// Per-instance data shared by the sandwich and end-to-end criteria.
struct OracleRun {
  double clust = 0.0;
  double r2 = 0.0;
  double c_of_b = 0.0;
  SdpSolution sdp;
  SearchResult cb;
};

inline std::vector<OracleRun> run_oracle_instances(const std::vector<OracleInstance>& set,
                                                   const AcceptanceOptions& opt, CbCache& cache) {
  std::vector<OracleRun> out;
  SearchConfig scfg;
  scfg.threads = opt.threads;
  SdpConfig dcfg;
  dcfg.threads = opt.threads;
  for (std::size_t i = 0; i < set.size(); ++i) {
    OracleRun run;
    run.clust = brute_force_clust(set[i].a, set[i].b).value;
    run.r2 = radius_squared(set[i].b);
    run.cb = cache.get(set[i].b, scfg);
    run.c_of_b = run.cb.c_estimate;
    run.sdp = solve_sdp(set[i].a, dcfg, opt.seed + i);
    out.push_back(std::move(run));
  }
  return out;
}

inline CriterionResult criterion_sandwich(const std::vector<OracleInstance>& set,
                                          const std::vector<OracleRun>& runs) {
  CriterionResult r{3, "sandwich Clust/R^2 <= SDP <= Clust/C", true};
  r.budget_seconds = 300.0;
  r.table.push_back("  #  n k   Clust/R2        SDP     Clust/C   residual");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const SandwichCheck s = certify_sandwich(run.sdp, run.clust, run.r2, run.c_of_b, 1e-3);
    r.table.push_back(detail::fmtn("%3zu %2d %d %10.6f %10.6f %10.6f %10.2e %s", i, set[i].a.dim(),
                                   set[i].b.dim(), s.lower, s.sdp, s.upper, s.slack,
                                   s.ok() ? "ok" : "FAIL"));
    r.pass = r.pass && s.ok();
  }
  return r;
}

inline CriterionResult criterion_rounding_expectation(const AcceptanceOptions& opt) {
  CriterionResult r{4, "rounding mean >= C * SDP - 3 stderr", true};
  r.budget_seconds = 180.0;
  SearchConfig scfg;
  scfg.threads = opt.threads;
  SdpConfig dcfg;
  dcfg.threads = opt.threads;
  r.table.push_back("  #   C*SDP        mean      stderr");
  for (int i = 0; i < 5; ++i) {
    const SymMatrix a = random_centered_psd(10, opt.seed, 500 + static_cast<std::uint64_t>(i));
    const SymMatrix b = random_psd(3, 3, opt.seed, 600 + static_cast<std::uint64_t>(i));
    const SearchResult cb = search_cb(b, scfg);
    const SdpSolution sdp = solve_sdp(a, dcfg, opt.seed + 50 + static_cast<std::uint64_t>(i));
    const Clustering best = round_best_of(a, b, sdp.vectors, cb.best, 500, opt.seed + 7, opt.threads);
    const Expectation e = estimate_expectation(best.trial_values);
    const double target = cb.c_estimate * sdp.value;
    const bool ok = e.mean >= target - 3.0 * e.std_error;
    r.table.push_back(detail::fmtn("%3d %10.6f %10.6f %10.2e %s", i, target, e.mean, e.std_error,
                                   ok ? "ok" : "FAIL"));
    r.pass = r.pass && ok;
  }
  return r;
}

inline CriterionResult criterion_end_to_end(const std::vector<OracleInstance>& set,
                                            const std::vector<OracleRun>& runs,
                                            const AcceptanceOptions& opt) {
  CriterionResult r{5, "best-of-100 rounding vs exhaustive optimum", true};
  r.budget_seconds = 300.0;
  int near_opt = 0;
  r.table.push_back("  #       Clust     rounded   fraction   C/R2");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const Clustering best = round_best_of(set[i].a, set[i].b, run.sdp.vectors, run.cb.best, 100,
                                          opt.seed + 11 * i, opt.threads);
    const double guarantee = run.c_of_b / run.r2;
    const double frac = run.clust > 0.0 ? best.value / run.clust : 1.0;
    const bool ok = best.value >= guarantee * run.clust - 1e-9 * (1.0 + std::abs(run.clust));
    if (frac >= 0.98) ++near_opt;
    r.table.push_back(detail::fmtn("%3zu %11.6f %11.6f %10.6f %6.4f %s", i, run.clust, best.value,
                                   frac, guarantee, ok ? "ok" : "FAIL"));
    r.pass = r.pass && ok;
  }
  r.table.push_back(detail::fmtn("instances within 0.98 of optimum: %d of %d", near_opt,
                                 static_cast<int>(runs.size())));
  if (near_opt < 20) {
    r.warnings.push_back(detail::fmtn("only %d of %d instances reached 0.98 of the optimum",
                                      near_opt, static_cast<int>(runs.size())));
  }
  return r;
}

inline CriterionResult criterion_quadrature(const AcceptanceOptions& opt) {
  CriterionResult r{6, "planar cone moments by Monte Carlo", true};
  r.budget_seconds = 60.0;
  const double pi = std::numbers::pi;
  const SymMatrix b = SymMatrix::identity(3);
  const std::size_t samples = 200000;
  r.table.push_back("  alpha     expected     measured     3*stderr");
  for (double alpha : {pi / 3, 2 * pi / 3, pi, 3 * pi / 2}) {
    ConicalPartition p;
    p.k = 3;
    p.active = {0, 1, 2};
    std::vector<int> cells;  // cells whose union is the cone of angle alpha
    if (alpha < pi - 1e-12) {
      const double rest = 0.5 * (2 * pi - alpha);
      p = partition_from_rays(3, {0, 1, 2}, {0.0, alpha, alpha + rest});
      cells = {0};
    } else if (std::abs(alpha - pi) <= 1e-12) {
      // Two half-planes; the third direction owns only a line.
      p.directions.resize(3, 2);
      p.directions << 0.0, 1.0, 0.0, -1.0, 0.0, 0.0;
      cells = {0};
    } else {
      const double rest = 2 * pi - alpha;  // complement, split into two sectors of alpha / 2
      p = partition_from_rays(3, {0, 1, 2}, {0.0, rest, rest + 0.5 * alpha});
      cells = {1, 2};
    }
    const PartitionValue v = partition_moments_mc(b, p, samples, opt.seed + 31);
    Vector z = Vector::Zero(2);
    for (int c : cells) z += v.moments[c];
    // The union's moment equals minus the complement cell's, so one cell's
    // standard error applies.
    const double measured = z.squaredNorm();
    const double expected = std::pow(std::sin(alpha / 2), 2) / (2 * pi);
    const double se = 2.0 * z.norm() * v.mc_stderr;
    const bool ok = std::abs(measured - expected) <= 3.0 * se;
    r.table.push_back(detail::fmtn("%7.4f %12.8f %12.8f %12.2e %s", alpha, expected, measured,
                                   3 * se, ok ? "ok" : "FAIL"));
    r.pass = r.pass && ok;
  }
  return r;
}

/// Ball invariants at stated tolerances; returns an empty string when all hold.
inline std::string check_ball_invariants(const SymMatrix& b) {
  const GramFactor g = gram_factorize(b);
  const EnclosingBall ball = min_enclosing_ball(g);
  const double r = ball.radius;
  const double tol = kBallTol * std::max(1.0, r);
  for (int i = 0; i < g.k; ++i)
    if ((g.vector(i) - ball.center).norm() > r + tol) return "point outside ball";
  if (ball.weights.minCoeff() < -1e-12) return "negative weight";
  if (std::abs(ball.weights.sum() - 1.0) > 1e-9) return "weights do not sum to 1";
  for (int i = 0; i < g.k; ++i) {
    if (ball.weights(i) > 0.0 && std::abs((g.vector(i) - ball.center).norm() - r) > 10 * tol)
      return "weight off the boundary";
  }
  const Vector mean = g.vectors.transpose() * ball.weights;
  if ((mean - ball.center).norm() > 10 * tol) return "center is not the weighted mean";
  const double spread = dictatorship_objective(g, ball.weights);
  if (std::abs(spread - ball.radius_squared()) > 10 * tol * std::max(1.0, r)) return "spread differs from R^2";
  // Exhaustive cross-check: the minimum over candidate circumspheres of
  // subsets that enclose everything.
  if (g.k <= 4) {
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << g.k); ++mask) {
      std::vector<int> on;
      for (int i = 0; i < g.k; ++i)
        if (mask & (1 << i)) on.push_back(i);
      const detail::Sphere s = detail::circumsphere(g.vectors, on);
      if (s.r2 < 0.0) continue;
      bool all = true;
      for (int i = 0; i < g.k; ++i)
        if ((g.vector(i) - s.center).squaredNorm() > s.r2 * (1 + 1e-9) + 1e-12) all = false;
      if (all) best = std::min(best, s.r2);
    }
    if (std::abs(best - ball.radius_squared()) > 1e-7 * std::max(1.0, best)) return "not minimal";
  }
  return {};
}

/// Orthonormal-basis invariants on one distribution; empty when all hold.
/// X_0 is constant 1, E_mu[X_i X_j] = delta_ij and
/// sum_j X_j(w) X_j(w') = delta_ww' / mu(w).
inline std::string check_basis_invariants(const LabelDistribution& dist,
                                          double orthonormal_tol = 1e-10,
                                          double completeness_tol = 1e-8) {
  const OrthonormalBasis basis = build_basis(dist);
  const int k = basis.k;
  for (int w = 0; w < k; ++w)
    if (basis.table(0, w) != 1.0) return "X_0 is not constant 1";
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double ip = 0.0;
      for (int w = 0; w < k; ++w) ip += dist.mu(w) * basis.table(i, w) * basis.table(j, w);
      if (std::abs(ip - (i == j ? 1.0 : 0.0)) > orthonormal_tol) return "not orthonormal under mu";
    }
  for (int w = 0; w < k; ++w)
    for (int v = 0; v < k; ++v) {
      const double sum = basis.table.col(w).dot(basis.table.col(v));
      const double want = w == v ? 1.0 / dist.mu(w) : 0.0;
      if (std::abs(sum - want) > completeness_tol * std::max(1.0, want)) return "not complete";
    }
  return {};
}

/// Random probability vector of length k with all entries positive.
inline LabelDistribution random_distribution(int k, std::uint64_t seed, std::uint64_t stream) {
  const CounterStream rng(seed, mix_stream(0xD15, stream));
  LabelDistribution d;
  d.mu.resize(k);
  for (int i = 0; i < k; ++i) d.mu(i) = 0.05 + rng.uniform(static_cast<std::uint64_t>(i));
  d.mu /= d.mu.sum();
  d.p = d.mu;
  return d;
}

inline CriterionResult criterion_structural(const AcceptanceOptions& opt) {
  CriterionResult r{7, "structural invariants", true};
  r.budget_seconds = 300.0;
  SearchConfig cfg;
  cfg.threads = opt.threads;
  const auto set = structural_b_set(50, opt.seed);
  int c_le_r2 = 0, sums = 0, residuals = 0, balls = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const SymMatrix& b = set[i];
    const double r2 = radius_squared(b);
    const SearchResult found = search_cb(b, cfg);
    // C(B) <= R^2, allowing the Monte Carlo error of the estimate.
    const double slack = 3.0 * found.value.psi_stderr + 1e-9 * std::max(1.0, r2);
    if (found.c_estimate <= r2 + slack) {
      ++c_le_r2;
    } else {
      r.table.push_back(detail::fmtn("B#%zu: C %.6f > R2 %.6f", i, found.c_estimate, r2));
    }
    Vector total = Vector::Zero(found.best.cone_dim());
    for (const auto& z : found.value.moments) total += z;
    if (total.norm() <= 1e-9) {
      ++sums;
    } else {
      r.table.push_back(detail::fmtn("B#%zu: moment sum %.3e", i, total.norm()));
    }
    const double fp_bound = std::max(1e-6, 3.0 * found.value.mc_stderr);
    if (found.fp_residual <= fp_bound) {
      ++residuals;
    } else {
      r.table.push_back(detail::fmtn("B#%zu: fixed-point residual %.3e > %.3e", i,
                                     found.fp_residual, fp_bound));
    }
    const std::string why = check_ball_invariants(b);
    if (why.empty()) {
      ++balls;
    } else {
      r.table.push_back(detail::fmtn("B#%zu: ball %s", i, why.c_str()));
    }
  }
  const int n = static_cast<int>(set.size());
  r.table.push_back(detail::fmtn("C <= R^2                 %d / %d", c_le_r2, n));
  r.table.push_back(detail::fmtn("moment sums vanish       %d / %d", sums, n));
  r.table.push_back(detail::fmtn("fixed-point residual     %d / %d", residuals, n));
  r.table.push_back(detail::fmtn("ball invariants          %d / %d", balls, n));
  r.pass = c_le_r2 == n && sums == n && residuals == n && balls == n;

  // Label permutation: relabeling B leaves C(B) unchanged (1% tolerance).
  int perm_ok = 0;
  const int perm_count = 10;
  for (int i = 0; i < perm_count; ++i) {
    const SymMatrix& b = set[static_cast<std::size_t>(i)];
    std::vector<int> perm(b.dim());
    for (int j = 0; j < b.dim(); ++j) perm[j] = (j + 1 + i) % b.dim();
    const SearchResult x = search_cb(b, cfg);
    const SearchResult y = search_cb(b.permuted(perm), cfg);
    const double tol = 0.01 * x.c_estimate;
    if (std::abs(x.c_estimate - y.c_estimate) <= tol) {
      ++perm_ok;
    } else {
      r.table.push_back(detail::fmtn("B#%d permuted: %.8f vs %.8f", i, x.c_estimate, y.c_estimate));
    }
  }
  r.table.push_back(detail::fmtn("permutation equivariance %d / %d", perm_ok, perm_count));
  r.pass = r.pass && perm_ok == perm_count;

  int basis_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const LabelDistribution d = random_distribution(2 + i % 6, opt.seed, static_cast<std::uint64_t>(i));
    const std::string why = check_basis_invariants(d);
    if (why.empty()) {
      ++basis_ok;
    } else {
      r.table.push_back(detail::fmtn("mu#%d: %s", i, why.c_str()));
    }
  }
  r.table.push_back(detail::fmtn("basis invariants         %d / 50", basis_ok));
  r.pass = r.pass && basis_ok == 50;
  return r;
}

inline CriterionResult criterion_hardness(const AcceptanceOptions& opt) {
  CriterionResult r{8, "dictatorship objective >= R^2 - eps", true};
  r.budget_seconds = 60.0;
  int ok_count = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + i % 5;
    const SymMatrix b = random_psd(k, k, opt.seed, 3000 + static_cast<std::uint64_t>(i));
    const GramFactor g = gram_factorize(b);
    const EnclosingBall ball = min_enclosing_ball(g);
    for (double eps : {1e-2, 1e-4}) {
      ++total;
      const LabelDistribution mu = build_mu(ball, g, eps);
      const double value = dictatorship_objective(b, mu);
      if (value >= ball.radius_squared() - eps) {
        ++ok_count;
      } else {
        r.table.push_back(detail::fmtn("B#%d eps=%.0e: %.8f < %.8f", i, eps, value,
                                       ball.radius_squared() - eps));
      }
    }
  }
  r.table.push_back(detail::fmtn("random B: %d / %d satisfy the bound", ok_count, total));
  LabelDistribution uniform;
  uniform.mu = Vector::Constant(3, 1.0 / 3.0);
  const double i3 = dictatorship_objective(SymMatrix::identity(3), uniform);
  r.table.push_back(detail::fmtn("I_3 uniform: expected %.15f got %.15f", 2.0 / 3.0, i3));
  r.pass = ok_count == total && std::abs(i3 - 2.0 / 3.0) <= 1e-12;
  return r;
}

/// Exact-oracle anchors used by the quick self-test.
inline CriterionResult criterion_oracle_anchors() {
  CriterionResult r{0, "oracle anchors", true};
  r.budget_seconds = 30.0;
  const double pi = std::numbers::pi;
  const SymMatrix a = SymMatrix::from_rows({{1, -1}, {-1, 1}});
  const double clust = brute_force_clust(a, SymMatrix::identity(2)).value;
  r.table.push_back(detail::fmtn("antipodal pair, B = I_2: expected 2 got %.12f", clust));
  r.pass = std::abs(clust - 2.0) <= 1e-12;
  for (double c : {1.0, 2.0}) {
    const double got = brute_force_c3(b_c_matrix(c), 360);
    const double want = formula_bc(c).c_of_b;
    r.table.push_back(detail::fmtn("ray grid C(B_c), c=%.0f: expected %.8f got %.8f", c, want, got));
    r.pass = r.pass && detail::rel_err(got, want) <= 1e-3;
  }
  const double i3 = brute_force_c3(SymMatrix::identity(3), 360);
  r.table.push_back(detail::fmtn("ray grid C(I_3): expected %.8f got %.8f", 9 / (8 * pi), i3));
  r.pass = r.pass && detail::rel_err(i3, 9 / (8 * pi)) <= 1e-3;
  return r;
}

/// Runs one fixture through the clustering pipeline and compares against its
/// "expect" block ({"best_value", "upper", "trivial"}; any subset).
inline CriterionResult check_fixture(const std::string& path, const AcceptanceOptions& opt) {
  CriterionResult r{-1, "fixture " + path, false};
  r.budget_seconds = 60.0;
  try {
    const std::string text = detail::read_file(path);
    const ProblemInput in = parse_problem_json(text);
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (!in.a || !in.b) throw Error(ErrorKind::kParseError, "fixture needs A and B");
    RunConfig cfg;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    CbCache cache;
    const Json report = run_cluster(*in.a, *in.b, cfg, cache);
    r.pass = true;
    if (doc.contains("expect")) {
      const auto& e = doc["expect"];
      const double best = report["rounding"]["best_value"].get<double>();
      const double upper = report["certified_interval"][1].get<double>();
      if (e.contains("best_value")) {
        const double want = e["best_value"].get<double>();
        r.table.push_back(detail::fmtn("best_value: expected %.9f got %.9f", want, best));
        r.pass = r.pass && std::abs(best - want) <= 1e-6 * std::max(1.0, std::abs(want));
      }
      if (e.contains("upper")) {
        const double want = e["upper"].get<double>();
        r.table.push_back(detail::fmtn("upper bound: expected %.9f got %.9f", want, upper));
        r.pass = r.pass && std::abs(upper - want) <= 1e-4 * std::max(1.0, std::abs(want));
      }
      if (e.contains("trivial")) {
        const bool want = e["trivial"].get<bool>();
        r.table.push_back(detail::fmtn("trivial: expected %d got %d", int(want),
                                       int(report["trivial"].get<bool>())));
        r.pass = r.pass && report["trivial"].get<bool>() == want;
      }
    }
  } catch (const std::exception& e) {
    r.table.push_back(std::string("error: ") + e.what());
    r.pass = false;
  }
  return r;
}

namespace detail {

inline CriterionResult timed(const std::function<CriterionResult()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn();
  } catch (const std::exception& e) {
    r.pass = false;
    r.table.push_back(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.budget_seconds > 0.0 && r.seconds > r.budget_seconds) {
    r.pass = false;
    r.table.push_back(fmtn("runtime %.1f s exceeds budget %.0f s", r.seconds, r.budget_seconds));
  }
  return r;
}

}  // namespace detail

/// Runs criteria 1-8 (or the quick subset: 1, 2 and the oracle anchors).
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                                   const std::function<void(const CriterionResult&)>& on_done = {}) {
  std::vector<CriterionResult> out;
  auto add = [&](CriterionResult r) {
    if (on_done) on_done(r);
    out.push_back(std::move(r));
  };
  add(detail::timed([&] { return criterion_bc_table(opt); }));
  add(detail::timed([&] { return criterion_grothendieck(opt); }));
  if (opt.quick) {
    add(detail::timed([] { return criterion_oracle_anchors(); }));
    return out;
  }
  const auto set = oracle_instances(25, opt.seed);
  CbCache cache;
  std::vector<OracleRun> runs;
  double shared_seconds = 0.0;
  {
    const auto start = std::chrono::steady_clock::now();
    runs = run_oracle_instances(set, opt, cache);
    shared_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  CriterionResult sandwich = detail::timed([&] { return criterion_sandwich(set, runs); });
  sandwich.seconds += shared_seconds;
  if (sandwich.seconds > sandwich.budget_seconds) sandwich.pass = false;
  add(sandwich);
  add(detail::timed([&] { return criterion_rounding_expectation(opt); }));
  add(detail::timed([&] { return criterion_end_to_end(set, runs, opt); }));
  add(detail::timed([&] { return criterion_quadrature(opt); }));
  add(detail::timed([&] { return criterion_structural(opt); }));
  add(detail::timed([&] { return criterion_hardness(opt); }));
  return out;
}

/// One summary line per criterion, followed by its table when `verbose`.
inline std::string format_result(const CriterionResult& r, bool verbose) {
  std::ostringstream os;
  const std::string label = r.id > 0 ? "criterion " + std::to_string(r.id) : r.id == 0 ? "oracle" : "fixture";
  os << (r.pass ? "PASS" : "FAIL") << "  " << label << ": " << r.name
     << detail::fmtn("  (%.1f s)", r.seconds) << "\n";
  for (const auto& w : r.warnings) os << "      WARNING: " << w << "\n";
  if (verbose || !r.pass)
    for (const auto& line : r.table) os << "      " << line << "\n";
  return os.str();
}

}  // namespace gramclust

#endif  // GRAMCLUST_ACCEPTANCE_HPP_
