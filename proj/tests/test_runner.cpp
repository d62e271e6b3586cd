#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mfbo/errors.hpp"
#include "mfbo/runner/config.hpp"
#include "mfbo/runner/experiment.hpp"
#include "mfbo/runner/oracle.hpp"

using namespace mfbo;
using namespace mfbo::runner;

namespace {

namespace fs = std::filesystem;

std::string temp_dir(const std::string& name) {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("mfbo_runner_" + std::to_string(++counter) + "_" + name);
  fs::create_directories(dir);
  return dir.string();
}

std::string write_config(const std::string& dir, const std::string& body) {
  const std::string path = (fs::path(dir) / "config.json").string();
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_demand_config(const std::string& out_dir) {
  const std::string dir = temp_dir("cfg");
  const std::string path = write_config(dir, R"({
    "environment": {
      "kind": "demand_matching",
      "population_m": 40,
      "noise_std": 0.0,
      "deterministic_mode": true,
      "demand": [0.5, 0.3, 0.2]
    },
    "algorithms": ["mf_gp_ucb", "random"],
    "budget_t": 6,
    "seeds": [0, 1],
    "acq": {"steps": 40, "restarts": 2},
    "gp_noise_std": 0.01,
    "output_dir": ")" + out_dir + R"("
  })");
  return load_experiment_config(path);
}

}  // namespace

TEST_CASE("config parsing resolves environments, defaults and errors") {
  const std::string dir = temp_dir("parse");
  const std::string path = write_config(dir, R"({
    "environment": {
      "kind": "swarm",
      "population_m": 50,
      "noise_std": 1.0,
      "congestion_sigma": 10.0,
      "num_actions": 30
    },
    "algorithms": ["mf_gp_ucb", "simulated_annealing"],
    "budget_t": 250,
    "seeds": [0, 1, 2],
    "beta": {"mode": "constant", "constant_value": 2.0},
    "output_dir": "out/swarm"
  })");
  const ExperimentConfig cfg = load_experiment_config(path);
  CHECK(cfg.environment.kind == EnvKind::Swarm);
  CHECK(cfg.environment.actions.size() == 30);
  CHECK(cfg.environment.actions.embeddings.front()[0] == 0.0);
  CHECK(cfg.environment.actions.embeddings.back()[0] ==
        doctest::Approx(2.0 * std::numbers::pi));
  CHECK(cfg.algorithms.size() == 2);
  CHECK(cfg.budget_t == 250);
  CHECK(cfg.seeds.size() == 3);

  const KernelParams kernel = resolve_kernel(cfg.kernel, cfg.environment);
  CHECK(kernel.lengthscale_action == doctest::Approx(0.2 * 2.0 * std::numbers::pi));
  CHECK(kernel.lengthscale_context == 1.0);  // single context, zero diameter
  CHECK(kernel.lengthscale_dist == doctest::Approx(0.2 * std::numbers::sqrt2));
  CHECK(resolve_gp_noise(cfg) == 1.0);

  const std::string bad = write_config(dir, R"({"environment": {"kind": "nope"}})");
  CHECK_THROWS_AS(load_experiment_config(bad), ConfigError);
  CHECK_THROWS_AS(load_experiment_config((fs::path(dir) / "missing.json").string()), IoError);
}

TEST_CASE("aggregate_best matches the hand example and the n=1 convention") {
  std::vector<std::vector<RunRecord>> runs(2);
  runs[0] = {{1, 0.0, 1.0, 0.0, 0.0}, {2, 0.0, 2.0, 0.0, 0.0}};
  runs[1] = {{1, 0.0, 3.0, 0.0, 0.0}, {2, 0.0, 4.0, 0.0, 0.0}};
  const auto agg = aggregate_best(runs);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].mean_best == 2.0);
  CHECK(agg[1].mean_best == 3.0);
  CHECK(agg[0].stderr_best == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(agg[1].stderr_best == doctest::Approx(1.0).epsilon(1e-12));

  const auto single = aggregate_best({runs[0]});
  CHECK(single[0].stderr_best == 0.0);
  CHECK(single[1].stderr_best == 0.0);
}

TEST_CASE("brute force oracle recovers exact demand grid points") {
  EnvironmentSpec spec;
  spec.kind = EnvKind::DemandMatching;
  spec.actions.embeddings = {{0.0}, {1.0}};
  spec.contexts = ContextMeasure::trivial();
  spec.population_m = 10;
  spec.demand = {0.7, 0.3};
  spec.deterministic_mode = true;

  const OracleResult oracle = brute_force_optimum(spec, 100);
  CHECK(oracle.g_star == 0.0);
  CHECK(oracle.xi_star(0, 0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(oracle.xi_star(0, 1) == doctest::Approx(0.3).epsilon(1e-12));

  // resolution 1: vertices only; best vertex is the one with most demand
  const OracleResult vertex = brute_force_optimum(spec, 1);
  CHECK(vertex.xi_star(0, 0) == 1.0);

  EnvironmentSpec three = spec;
  three.actions.embeddings = {{0.0}, {0.5}, {1.0}};
  three.demand = {0.5, 0.3, 0.2};
  const OracleResult exact = brute_force_optimum(three, 20);
  CHECK(exact.g_star == 0.0);
  CHECK(exact.xi_star(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(exact.xi_star(0, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(exact.xi_star(0, 2) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("brute force guard rejects spaces beyond the tractable size") {
  EnvironmentSpec spec;
  spec.kind = EnvKind::DemandMatching;
  for (int i = 0; i < 6; ++i) {
    spec.actions.embeddings.push_back({static_cast<double>(i)});
  }
  spec.contexts = ContextMeasure::trivial();
  spec.population_m = 4;
  spec.demand.assign(6, 1.0 / 6.0);
  CHECK_THROWS_AS(brute_force_optimum(spec, 10), std::invalid_argument);
}

TEST_CASE("regret curve arithmetic") {
  std::vector<RunRecord> records;
  for (int t = 1; t <= 5; ++t) records.push_back({t, 2.0, 2.0, 2.0, 0.0});
  const auto flat = regret_curve(records, 2.0);
  for (double r : flat) CHECK(r == 0.0);

  for (auto& r : records) r.reward = 1.0;
  const auto linear = regret_curve(records, 2.0);
  for (int t = 1; t <= 5; ++t) CHECK(linear[t - 1] == doctest::Approx(t).epsilon(1e-15));
}

TEST_CASE("cold start uses the uniform distribution and logs one record") {
  ExperimentConfig cfg = tiny_demand_config(temp_dir("cold"));
  cfg.budget_t = 1;
  const RunResult result = run_mf_gp_ucb(cfg, 0);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].iteration == 1);
  for (int a = 0; a < 3; ++a) {
    CHECK(result.best_solution(0, a) == doctest::Approx(1.0 / 3.0));
  }
  // deterministic demand matching at uniform xi: reward is -JS(uniform, demand)
  CHECK(result.records[0].reward < 0.0);
  CHECK(result.gp_input_dim == 1 + 1 + 3);
}

TEST_CASE("fixed seeds reproduce identical run records") {
  const ExperimentConfig cfg = tiny_demand_config(temp_dir("det"));
  const RunResult a = run_mf_gp_ucb(cfg, 3);
  const RunResult b = run_mf_gp_ucb(cfg, 3);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].reward == b.records[i].reward);
    CHECK(a.records[i].best_reward == b.records[i].best_reward);
    CHECK(a.records[i].observed_y == b.records[i].observed_y);
  }
}

TEST_CASE("run_experiment writes the full file set and reruns byte-identically") {
  const std::string out_dir = temp_dir("exp");
  const ExperimentConfig cfg = tiny_demand_config(out_dir);
  run_experiment(cfg);

  const std::vector<std::string> expected = {
      "run_mf_gp_ucb_0.csv", "run_mf_gp_ucb_1.csv", "run_random_0.csv",
      "run_random_1.csv",    "agg_mf_gp_ucb.csv",   "agg_random.csv",
      "timing_mf_gp_ucb_0.csv", "best_xi_mf_gp_ucb.csv", "convergence.svg",
      "histogram.svg"};
  for (const std::string& name : expected) {
    CHECK_MESSAGE(fs::exists(fs::path(out_dir) / name), name);
  }

  const std::string before = slurp((fs::path(out_dir) / "run_mf_gp_ucb_0.csv").string());
  const std::string agg_before = slurp((fs::path(out_dir) / "agg_mf_gp_ucb.csv").string());
  run_experiment(cfg);
  CHECK(slurp((fs::path(out_dir) / "run_mf_gp_ucb_0.csv").string()) == before);
  CHECK(slurp((fs::path(out_dir) / "agg_mf_gp_ucb.csv").string()) == agg_before);

  // read-back round trip
  const auto records = read_run_csv((fs::path(out_dir) / "run_mf_gp_ucb_0.csv").string());
  CHECK(static_cast<int>(records.size()) == cfg.budget_t);
  aggregate_directory(out_dir);
  CHECK(slurp((fs::path(out_dir) / "agg_mf_gp_ucb.csv").string()) == agg_before);
  plot_directory(out_dir);
  CHECK(fs::exists(fs::path(out_dir) / "convergence.svg"));
}

TEST_CASE("solution csv round-trips the xi matrix") {
  Matrix rows(2, 3);
  rows(0, 0) = 0.2;
  rows(0, 1) = 0.3;
  rows(0, 2) = 0.5;
  rows(1, 0) = 1.0;
  const std::string dir = temp_dir("sol");
  const std::string path = (fs::path(dir) / "best_xi_test.csv").string();
  write_solution_csv(path, rows, {"x", "y", "z"});
  const Matrix back = read_solution_csv(path);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t a = 0; a < 3; ++a) CHECK(back(c, a) == rows(c, a));
  }
}
