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

#ifndef GRAMCLUST_PIPELINE_HPP_
#define GRAMCLUST_PIPELINE_HPP_

// Batch pipeline behind the command-line tool: ingest A and B, run
// validate -> Gram -> ball -> C(B) -> SDP -> rounding, and assemble a
// deterministic JSON report.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gramclust/ball.hpp"
#include "gramclust/conic.hpp"
#include "gramclust/errors.hpp"
#include "gramclust/hardness.hpp"
#include "gramclust/matrix.hpp"
#include "gramclust/oracle.hpp"
#include "gramclust/rounding.hpp"
#include "gramclust/sdp.hpp"

namespace gramclust {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input

struct ProblemInput {
  std::optional<SymMatrix> a;
  std::optional<SymMatrix> b;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SymMatrix matrix_from_json(const nlohmann::json& node, const std::string& name) {
  if (!node.is_array() || node.empty()) {
    throw Error(ErrorKind::kParseError, name + " must be a non-empty array of rows");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : node) {
    if (!row.is_array()) throw Error(ErrorKind::kParseError, name + " rows must be arrays");
    std::vector<double> values;
    for (const auto& x : row) {
      if (!x.is_number()) throw Error(ErrorKind::kParseError, name + " entries must be numbers");
      values.push_back(x.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return SymMatrix::from_rows(rows);
}

}  // namespace detail

/// Parses {"A": [[...]], "B": [[...]]}; either key may be absent.
inline ProblemInput parse_problem_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kParseError, "top level must be an object");
  ProblemInput out;
  if (doc.contains("A")) out.a = detail::matrix_from_json(doc["A"], "A");
  if (doc.contains("B")) out.b = detail::matrix_from_json(doc["B"], "B");
  return out;
}

inline ProblemInput load_problem_json(const std::string& path) {
  return parse_problem_json(detail::read_file(path));
}

/// One matrix row per line; entries separated by commas and/or whitespace.
/// Blank lines and lines starting with '#' are skipped.
inline SymMatrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream fields(line);
    std::string tok;
    std::vector<double> row;
    while (fields >> tok) {
      if (row.empty() && tok[0] == '#') break;
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw Error(ErrorKind::kParseError, "not a number: '" + tok + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return SymMatrix::from_rows(rows);
}

inline SymMatrix load_matrix_csv(const std::string& path) {
  return parse_matrix_csv(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Configuration and the C(B) cache

struct RunConfig {
  SearchConfig search;
  SdpConfig sdp;
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  double hardness_epsilon = 1e-2;
  bool hardness = true;
  std::string cache_dir;  // empty: in-memory cache only

  void propagate() {
    search.seed = seed;
    search.threads = threads;
    sdp.threads = threads;
  }
};

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

inline Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline Json one_based(const std::vector<int>& labels) {
  Json out = Json::array();
  for (int l : labels) out.push_back(l + 1);
  return out;
}

inline Json search_to_json(const SearchResult& r) {
  Json j;
  j["c_estimate"] = r.c_estimate;
  j["active"] = one_based(r.best.active);
  j["directions"] = to_json(r.best.directions);
  Json moments = Json::array();
  for (const auto& z : r.value.moments) moments.push_back(to_json(z));
  j["moments"] = moments;
  j["masses"] = to_json(r.value.masses);
  j["exact_moments"] = r.value.exact;
  j["mc_stderr"] = r.value.mc_stderr;
  j["psi_stderr"] = r.value.psi_stderr;
  j["fixed_point_residual"] = r.fp_residual;
  j["heuristic"] = r.heuristic;
  j["net_exhaustive"] = r.net_exhaustive;
  j["net_delta"] = r.net_delta;
  j["log10_net_points_required"] = r.log10_net_points_required;
  j["epsilon"] = r.epsilon;
  j["candidates"] = r.candidates;
  return j;
}

inline SearchResult search_from_json(const Json& j, int k, double r2) {
  SearchResult r;
  r.r2 = r2;
  r.c_estimate = j.at("c_estimate").get<double>();
  r.best.k = k;
  for (const auto& l : j.at("active")) r.best.active.push_back(l.get<int>() - 1);
  const auto ell = static_cast<Eigen::Index>(r.best.active.size());
  r.best.directions = Matrix::Zero(ell, std::max<Eigen::Index>(ell - 1, 0));
  const auto& dirs = j.at("directions");
  for (Eigen::Index a = 0; a < ell; ++a)
    for (Eigen::Index c = 0; c + 1 < ell; ++c)
      r.best.directions(a, c) = dirs[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)].get<double>();
  for (const auto& z : j.at("moments")) r.value.moments.push_back(vector_from_json(z));
  r.value.masses = vector_from_json(j.at("masses"));
  r.value.psi = r.c_estimate;
  r.value.exact = j.at("exact_moments").get<bool>();
  r.value.mc_stderr = j.at("mc_stderr").get<double>();
  r.value.psi_stderr = j.at("psi_stderr").get<double>();
  r.fp_residual = j.at("fixed_point_residual").get<double>();
  r.heuristic = j.at("heuristic").get<bool>();
  r.net_exhaustive = j.at("net_exhaustive").get<bool>();
  r.net_delta = j.at("net_delta").get<double>();
  r.log10_net_points_required = j.at("log10_net_points_required").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.candidates = j.at("candidates").get<int>();
  return r;
}

/// C(B) results keyed by the content hash of B and every search setting that
/// can change the answer. Optionally persisted as one JSON file per key.
class CbCache {
 public:
  explicit CbCache(std::string dir = {}) : dir_(std::move(dir)) {}

  static std::uint64_t key(const SymMatrix& b, const SearchConfig& cfg) {
    std::uint64_t h = content_hash(b);
    auto mix = [&h](double x) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(x));
      std::memcpy(&bits, &x, sizeof(x));
      h = mix_stream(h, bits);
    };
    mix(cfg.epsilon);
    mix(cfg.net_delta_override);
    mix(static_cast<double>(cfg.mc_samples));
    mix(static_cast<double>(cfg.search_samples));
    mix(cfg.fp_tol);
    mix(cfg.max_iters);
    mix(static_cast<double>(cfg.seed));
    mix(cfg.max_net_points);
    mix(cfg.angle_grid);
    return h;
  }

  /// Cached search_cb; `hit` reports whether the value was reused.
  SearchResult get(const SymMatrix& b, const SearchConfig& cfg, bool* hit = nullptr) {
    const std::uint64_t id = key(b, cfg);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = memory_.find(id);
      if (it != memory_.end()) {
        if (hit) *hit = true;
        return it->second;
      }
    }
    if (!dir_.empty()) {
      const auto path = std::filesystem::path(dir_) / ("cb-" + hex64(id) + ".json");
      if (std::filesystem::exists(path)) {
        try {
          const Json j = Json::parse(detail::read_file(path.string()));
          SearchResult r = search_from_json(j, b.dim(), j.at("r2").get<double>());
          std::lock_guard<std::mutex> lock(mutex_);
          memory_[id] = r;
          if (hit) *hit = true;
          return r;
        } catch (const std::exception&) {
          // unreadable entry: recompute and overwrite
        }
      }
    }
    SearchResult r = search_cb(b, cfg);
    if (!dir_.empty()) {
      std::filesystem::create_directories(dir_);
      Json j = search_to_json(r);
      j["r2"] = r.r2;
      std::ofstream out(std::filesystem::path(dir_) / ("cb-" + hex64(id) + ".json"));
      out << j.dump(2) << "\n";
    }
    std::lock_guard<std::mutex> lock(mutex_);
    memory_[id] = r;
    if (hit) *hit = false;
    return r;
  }

 private:
  std::string dir_;
  std::mutex mutex_;
  std::map<std::uint64_t, SearchResult> memory_;
};

// ---------------------------------------------------------------------------
// Reports

inline Json inputs_block(const SymMatrix* a, const SymMatrix& b) {
  Json j;
  if (a) {
    j["n"] = a->dim();
    j["a_hash"] = hex64(content_hash(*a));
    j["a_symmetrized"] = a->was_symmetrized();
    j["a_max_asymmetry"] = a->max_asymmetry();
  }
  j["k"] = b.dim();
  j["b_hash"] = hex64(content_hash(b));
  j["b_symmetrized"] = b.was_symmetrized();
  j["b_max_asymmetry"] = b.max_asymmetry();
  return j;
}

inline Json ball_block(const EnclosingBall& ball) {
  Json j;
  j["r2"] = ball.radius_squared();
  j["radius"] = ball.radius;
  j["center"] = to_json(ball.center);
  j["support"] = one_based(ball.support);
  j["p"] = to_json(ball.weights);
  j["weights_rule"] = ball.support_affinely_dependent ? "minimum-norm (affinely dependent support)"
                                                      : "unique";
  j["method"] = ball.method;
  return j;
}

inline Json hardness_block(const EnclosingBall& ball, const GramFactor& g, double c_of_b,
                           double epsilon) {
  Json j;
  const LabelDistribution mu = build_mu(ball, g, epsilon);
  const double dict = dictatorship_objective(g, mu.mu);
  j["epsilon"] = epsilon;
  j["beta"] = mu.beta;
  j["mu"] = to_json(mu.mu);
  j["dictatorship_objective"] = dict;
  j["gap_over_c"] = c_of_b > 0.0 ? Json(dict / c_of_b) : Json(nullptr);
  return j;
}

inline Json header(const char* command, const RunConfig& cfg) {
  Json j;
  j["tool"] = "gramclust";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  return j;
}

inline Json config_block(const RunConfig& cfg) {
  Json j;
  j["trials"] = cfg.trials;
  j["mc_samples"] = cfg.search.mc_samples;
  j["epsilon"] = cfg.search.epsilon;
  j["fp_tol"] = cfg.search.fp_tol;
  j["max_iters"] = cfg.search.max_iters;
  j["sdp_rank0"] = cfg.sdp.rank0;
  j["sdp_grad_tol"] = cfg.sdp.grad_tol;
  j["sdp_max_iters"] = cfg.sdp.max_iters;
  j["sdp_restarts"] = cfg.sdp.restarts;
  return j;
}

/// Full clustering pipeline. A degenerate B (all Gram vectors equal) yields
/// the trivial report: every assignment scores 0 on a centered A.
inline Json run_cluster(const SymMatrix& a, const SymMatrix& b, RunConfig cfg, CbCache& cache) {
  cfg.propagate();
  if (!validate_psd(a)) throw Error(ErrorKind::kNotPSD, "A is not positive semidefinite");
  if (!validate_centered(a)) throw Error(ErrorKind::kNotCentered, "entries of A do not sum to 0");
  if (!validate_psd(b)) throw Error(ErrorKind::kNotPSD, "B is not positive semidefinite");

  Json report = header("cluster", cfg);
  report["config"] = config_block(cfg);
  report["inputs"] = inputs_block(&a, b);
  const GramFactor g = gram_factorize(b);
  const EnclosingBall ball = min_enclosing_ball(g);
  report["ball"] = ball_block(ball);
  const double r2 = ball.radius_squared();

  SearchResult cb;
  try {
    cb = cache.get(b, cfg.search);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateB) throw;
    report["trivial"] = true;
    report["trivial_reason"] = e.what();
    Json rounding;
    rounding["best_sigma"] = one_based(Assignment(a.dim(), 0));
    rounding["best_value"] = 0.0;
    report["rounding"] = rounding;
    report["certified_interval"] = Json::array({0.0, 0.0});
    return report;
  }
  report["trivial"] = false;
  report["cb"] = search_to_json(cb);

  const SdpSolution sdp = solve_sdp(a, cfg.sdp, cfg.seed);
  Json sj;
  sj["value"] = sdp.value;
  sj["rank"] = sdp.rank;
  sj["residual"] = sdp.stationarity_residual;
  sj["iterations"] = sdp.iterations;
  sj["converged"] = sdp.converged;
  sj["dual_bound"] = sdp.dual_bound;
  report["sdp"] = sj;

  const Clustering best =
      round_best_of(a, b, sdp.vectors, cb.best, cfg.trials, cfg.seed, cfg.threads);
  Json rj;
  rj["trials"] = cfg.trials;
  rj["best_sigma"] = one_based(best.sigma);
  rj["best_value"] = best.value;
  rj["best_trial"] = best.trial_index;
  if (best.trial_values.size() >= 2) {
    const Expectation e = estimate_expectation(best.trial_values);
    rj["trial_mean"] = e.mean;
    rj["trial_stderr"] = e.std_error;
  } else {
    rj["trial_mean"] = best.trial_values.front();
    rj["trial_stderr"] = nullptr;
  }
  report["rounding"] = rj;

  const double upper = r2 * sdp.value;
  report["certified_interval"] = Json::array({best.value, upper});
  report["interval_consistent"] = best.value <= upper * (1.0 + 1e-6) + 1e-12;
  Json factor;
  factor["r2_over_c"] = r2 / cb.c_estimate;
  factor["label"] = cb.heuristic ? "empirical lower bound on C(B)" : "guaranteed";
  report["approximation_factor"] = factor;
  if (cfg.hardness) report["hardness"] = hardness_block(ball, g, cb.c_estimate, cfg.hardness_epsilon);
  return report;
}

/// Per-B constants: R^2, C(B), their ratio, p, mu, the dictatorship value
/// and the partition used for rounding.
inline Json run_analyze_b(const SymMatrix& b, RunConfig cfg, CbCache& cache) {
  cfg.propagate();
  if (!validate_psd(b)) throw Error(ErrorKind::kNotPSD, "B is not positive semidefinite");
  Json report = header("analyze-b", cfg);
  report["inputs"] = inputs_block(nullptr, b);
  const GramFactor g = gram_factorize(b);
  const EnclosingBall ball = min_enclosing_ball(g);
  report["ball"] = ball_block(ball);
  const double r2 = ball.radius_squared();
  try {
    const SearchResult cb = cache.get(b, cfg.search);
    report["trivial"] = false;
    report["r2"] = r2;
    report["c_of_b"] = cb.c_estimate;
    report["ratio"] = r2 / cb.c_estimate;
    report["cb"] = search_to_json(cb);
    report["hardness"] = hardness_block(ball, g, cb.c_estimate, cfg.hardness_epsilon);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateB) throw;
    report["trivial"] = true;
    report["trivial_reason"] = e.what();
    report["r2"] = r2;
    report["c_of_b"] = 0.0;
    report["ratio"] = nullptr;
  }
  return report;
}

/// Exhaustive Clust(A|B) when both matrices are given; the ray-grid C(B)
/// when B is 3x3.
inline Json run_oracle(const ProblemInput& in, int grid, double max_states, const RunConfig& cfg) {
  if (!in.b) throw Error(ErrorKind::kParseError, "oracle needs B");
  Json report = header("oracle", cfg);
  report["inputs"] = inputs_block(in.a ? &*in.a : nullptr, *in.b);
  if (in.a) {
    const ExactClustering exact = brute_force_clust(*in.a, *in.b, max_states);
    Json j;
    j["value"] = exact.value;
    j["sigma"] = one_based(exact.sigma);
    j["states"] = exact.states;
    report["clust"] = j;
  }
  if (in.b->dim() == 3) {
    Json j;
    j["grid"] = grid;
    j["c_of_b"] = brute_force_c3(*in.b, grid);
    report["c3"] = j;
  }
  return report;
}

/// CLI exit code for a library error.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParseError:
    case ErrorKind::kNotPSD:
    case ErrorKind::kNotCentered:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kLabelOutOfRange:
    case ErrorKind::kTooLarge:
    case ErrorKind::kInvalidArgument:
      return 2;
    default:
      return 3;
  }
}

}  // namespace gramclust

#endif  // GRAMCLUST_PIPELINE_HPP_
