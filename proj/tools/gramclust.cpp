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

// Command-line front end: cluster, analyze-b, oracle, selftest.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gramclust/acceptance.hpp"
#include "gramclust/parallel.hpp"
#include "gramclust/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 4;

struct Inputs {
  std::string json;
  std::string a_csv;
  std::string b_csv;
};

gramclust::ProblemInput load(const Inputs& in) {
  gramclust::ProblemInput out;
  if (!in.json.empty()) out = gramclust::load_problem_json(in.json);
  if (!in.a_csv.empty()) out.a = gramclust::load_matrix_csv(in.a_csv);
  if (!in.b_csv.empty()) out.b = gramclust::load_matrix_csv(in.b_csv);
  return out;
}

void emit(const gramclust::Json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw gramclust::Error(gramclust::ErrorKind::kParseError, "cannot write " + path);
  out << text;
}

void add_input_options(CLI::App* cmd, Inputs& in) {
  cmd->add_option("input", in.json, "JSON document {\"A\": [[...]], \"B\": [[...]]}");
  cmd->add_option("--a", in.a_csv, "A as a CSV file");
  cmd->add_option("--b", in.b_csv, "B as a CSV file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel clustering with a PSD hypothesis matrix"};
  app.require_subcommand(1);

  gramclust::RunConfig cfg;
  cfg.threads = gramclust::default_thread_count();
  std::string out_path;
  std::string format = "json";
  std::string cache_dir;
  double mc_samples = static_cast<double>(cfg.search.mc_samples);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--threads", cfg.threads, "worker threads (default: GRAMCLUST_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_path, "write the report here instead of stdout");
    cmd->add_option("--format", format, "report format")->check(CLI::IsMember({"json"}));
  };
  auto add_search = [&](CLI::App* cmd) {
    cmd->add_option("--mc-samples", mc_samples, "Monte Carlo samples for partitions with >= 4 cells")
        ->check(CLI::Range(1000.0, 1e9));
    cmd->add_option("--epsilon", cfg.search.epsilon, "C(B) search accuracy (default 1e-3 R^2)");
    cmd->add_option("--max-net-points", cfg.search.max_net_points, "multistart seeds per active set");
    cmd->add_option("--fp-tol", cfg.search.fp_tol, "fixed-point tolerance");
    cmd->add_option("--hardness-epsilon", cfg.hardness_epsilon, "epsilon for the label distribution");
    cmd->add_option("--cache-dir", cache_dir, "persist C(B) results in this directory");
  };

  Inputs cluster_in;
  auto* cluster = app.add_subcommand("cluster", "run the full pipeline on A and B");
  add_input_options(cluster, cluster_in);
  add_common(cluster);
  add_search(cluster);
  cluster->add_option("--trials", cfg.trials, "rounding trials")->check(CLI::PositiveNumber);
  cluster->add_option("--sdp-rank0", cfg.sdp.rank0, "initial factorization rank (0: automatic)");
  cluster->add_option("--sdp-grad-tol", cfg.sdp.grad_tol, "stationarity tolerance (0: automatic)");
  cluster->add_option("--sdp-max-iters", cfg.sdp.max_iters, "sweep cap per restart");
  cluster->add_option("--sdp-restarts", cfg.sdp.restarts, "random restarts")->check(CLI::PositiveNumber);
  bool no_hardness = false;
  cluster->add_flag("--no-hardness", no_hardness, "omit the hardness block");

  Inputs analyze_in;
  auto* analyze = app.add_subcommand("analyze-b", "R(B)^2, C(B), ratio and hardness constants");
  add_input_options(analyze, analyze_in);
  add_common(analyze);
  add_search(analyze);

  Inputs oracle_in;
  int grid = 360;
  double max_states = gramclust::kMaxOracleStates;
  auto* oracle = app.add_subcommand("oracle", "exhaustive Clust(A|B) and ray-grid C(B) for k = 3");
  add_input_options(oracle, oracle_in);
  add_common(oracle);
  oracle->add_option("--grid", grid, "ray grid per axis (>= 180)");
  oracle->add_option("--max-states", max_states, "refuse instances with more assignments");

  bool quick = false;
  bool verbose = false;
  std::string fixtures;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--seed", cfg.seed, "suite seed (default 2026)");
  selftest->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  selftest->add_flag("--quick", quick, "formula and oracle checks only");
  selftest->add_flag("-v,--verbose", verbose, "print every table");
  selftest->add_option("--fixtures", fixtures, "also check every *.json fixture in this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.search.mc_samples = static_cast<std::size_t>(mc_samples);
    cfg.hardness = !no_hardness;
    gramclust::CbCache cache(cache_dir);

    if (cluster->parsed()) {
      const auto in = load(cluster_in);
      if (!in.a || !in.b) throw gramclust::Error(gramclust::ErrorKind::kParseError, "need both A and B");
      emit(gramclust::run_cluster(*in.a, *in.b, cfg, cache), out_path);
    } else if (analyze->parsed()) {
      const auto in = load(analyze_in);
      if (!in.b) throw gramclust::Error(gramclust::ErrorKind::kParseError, "need B");
      emit(gramclust::run_analyze_b(*in.b, cfg, cache), out_path);
    } else if (oracle->parsed()) {
      emit(gramclust::run_oracle(load(oracle_in), grid, max_states, cfg), out_path);
    } else if (selftest->parsed()) {
      gramclust::AcceptanceOptions opt;
      opt.quick = quick;
      opt.threads = cfg.threads;
      if (selftest->count("--seed") > 0) opt.seed = cfg.seed;
      bool all = true;
      auto print = [&](const gramclust::CriterionResult& r) {
        std::cout << gramclust::format_result(r, verbose || r.id == 1) << std::flush;
        all = all && r.pass;
      };
      gramclust::run_acceptance(opt, print);
      if (!fixtures.empty()) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(fixtures))
          if (entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) {
          std::cout << "FAIL  fixtures: no *.json files in " << fixtures << "\n";
          all = false;
        }
        for (const auto& f : files) print(gramclust::check_fixture(f.string(), opt));
      }
      std::cout << (all ? "selftest passed" : "selftest FAILED") << "\n";
      return all ? kExitOk : kExitSelftest;
    }
  } catch (const gramclust::Error& e) {
    std::cerr << "gramclust: " << e.what() << "\n";
    return gramclust::exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "gramclust: " << e.what() << "\n";
    return 2;
  }
  return kExitOk;
}
