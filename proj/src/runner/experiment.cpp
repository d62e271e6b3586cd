#include "mfbo/runner/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "mfbo/acquisition.hpp"
#include "mfbo/errors.hpp"
#include "mfbo/runner/svg.hpp"

namespace mfbo::runner {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kEnvStream = 0x10;
constexpr std::uint64_t kAcqStream = 0x20;
constexpr std::uint64_t kAlgStream = 0x30;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunResult run_mf_gp_ucb(const ExperimentConfig& cfg, std::uint64_t seed) {
  const EnvironmentSpec& env = cfg.environment;
  env.validate();
  const int num_actions = env.actions.size();
  const int num_contexts = env.contexts.size();

  const KernelParams kernel = resolve_kernel(cfg.kernel, env);
  const NoiseModel gp_noise{resolve_gp_noise(cfg)};
  const FitOptions fit_options{cfg.kernel.standardize_targets};

  Rng root(seed);
  Rng env_rng = root.derive(kEnvStream);
  Rng acq_rng = root.derive(kAcqStream);

  ObservationBuffer buffer;
  RunResult result;
  result.gp_input_dim = env.actions.dim() + env.contexts.dim() + num_actions * num_contexts;

  double best = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.budget_t; ++t) {
    const auto start = Clock::now();
    std::optional<GpPosterior> post;
    if (!buffer.empty()) {
      post.emplace(fit(buffer, kernel, gp_noise, num_contexts, fit_options));
    }
    const double beta = beta_value(t, num_actions, num_contexts, cfg.beta);
    const ConditionalDistribution xi = optimize_acquisition(
        post.has_value() ? &*post : nullptr, beta, env.contexts, env.actions, cfg.acq,
        acq_rng);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    const StepOutcome outcome = env_step(env, xi, env_rng);

    GpInput z;
    z.action_vec =
        env.actions.embeddings[outcome.assignment.action_idx[outcome.representative_idx]];
    z.context_vec =
        env.contexts.embeddings[outcome.assignment.context_idx[outcome.representative_idx]];
    z.dist_flat = flatten_distribution(xi);
    buffer.append(std::move(z), outcome.observed_y);

    if (outcome.system_reward > best) {
      best = outcome.system_reward;
      result.best_solution = xi.rows();
    }
    RunRecord rec;
    rec.iteration = t;
    rec.reward = outcome.system_reward;
    rec.best_reward = best;
    rec.observed_y = outcome.observed_y;
    rec.wall_ms = wall_ms;
    result.records.push_back(rec);
  }
  return result;
}

RunResult run_algorithm(const ExperimentConfig& cfg, Algorithm algo, std::uint64_t seed) {
  switch (algo) {
    case Algorithm::MfGpUcb:
      return run_mf_gp_ucb(cfg, seed);
    case Algorithm::Random: {
      Rng rng = Rng(seed).derive(kAlgStream);
      return random_search_run(cfg.environment, cfg.budget_t, rng);
    }
    case Algorithm::SimulatedAnnealing: {
      Rng rng = Rng(seed).derive(kAlgStream);
      return simulated_annealing_run(cfg.environment, cfg.sa, cfg.budget_t, rng);
    }
    case Algorithm::GeneticAlgorithm: {
      Rng rng = Rng(seed).derive(kAlgStream);
      return genetic_algorithm_run(cfg.environment, cfg.ga, cfg.budget_t, rng);
    }
  }
  throw std::logic_error("run_algorithm: unknown algorithm");
}

std::vector<AggregateRow> aggregate_best(const std::vector<std::vector<RunRecord>>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate_best: no runs");
  const std::size_t len = runs.front().size();
  for (const auto& run : runs) {
    if (run.size() != len) {
      throw std::invalid_argument("aggregate_best: runs have different lengths");
    }
  }
  const double n = static_cast<double>(runs.size());
  std::vector<AggregateRow> rows(len);
  for (std::size_t i = 0; i < len; ++i) {
    double mean = 0.0;
    for (const auto& run : runs) mean += run[i].best_reward;
    mean /= n;
    double se = 0.0;
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& run : runs) {
        const double d = run[i].best_reward - mean;
        ss += d * d;
      }
      se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    rows[i] = {runs.front()[i].iteration, mean, se};
  }
  return rows;
}

void write_run_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iteration,reward,best_reward,observed_y\n";
  for (const RunRecord& r : records) {
    out << r.iteration << ',' << num(r.reward) << ',' << num(r.best_reward) << ','
        << num(r.observed_y) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_timing_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iteration,wall_ms\n";
  for (const RunRecord& r : records) {
    out << r.iteration << ',' << num(r.wall_ms) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<RunRecord> read_run_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty run file " + path);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RunRecord r;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &r.iteration, &r.reward,
                    &r.best_reward, &r.observed_y) != 4) {
      throw IoError("malformed row in " + path + ": " + line);
    }
    records.push_back(r);
  }
  if (records.empty()) throw IoError("no records in " + path);
  return records;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iteration,mean_best,stderr_best\n";
  for (const AggregateRow& r : rows) {
    out << r.iteration << ',' << num(r.mean_best) << ',' << num(r.stderr_best) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty aggregate file " + path);
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    AggregateRow r;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf", &r.iteration, &r.mean_best,
                    &r.stderr_best) != 3) {
      throw IoError("malformed row in " + path + ": " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

void write_solution_csv(const std::string& path, const Matrix& xi_rows,
                        const std::vector<std::string>& action_labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "context,action,label,prob\n";
  for (std::size_t c = 0; c < xi_rows.rows(); ++c) {
    for (std::size_t a = 0; a < xi_rows.cols(); ++a) {
      const std::string label =
          a < action_labels.size() ? action_labels[a] : std::to_string(a);
      out << c << ',' << a << ',' << label << ',' << num(xi_rows(c, a)) << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

Matrix read_solution_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty solution file " + path);
  std::vector<std::tuple<int, int, double>> cells;
  int max_c = -1, max_a = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int c = 0, a = 0;
    double prob = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%*[^,],%lf", &c, &a, &prob) != 3 &&
        std::sscanf(line.c_str(), "%d,%d,,%lf", &c, &a, &prob) != 3) {
      throw IoError("malformed row in " + path + ": " + line);
    }
    cells.emplace_back(c, a, prob);
    max_c = std::max(max_c, c);
    max_a = std::max(max_a, a);
  }
  if (cells.empty()) throw IoError("no rows in " + path);
  Matrix rows(max_c + 1, max_a + 1);
  for (const auto& [c, a, p] : cells) rows(c, a) = p;
  return rows;
}

namespace {

unsigned resolve_threads(std::size_t tasks) {
  unsigned threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (const char* env = std::getenv("MFBO_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) threads = static_cast<unsigned>(parsed);
  }
  return std::min<unsigned>(threads, static_cast<unsigned>(tasks));
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);

  struct Task {
    Algorithm algo;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Algorithm algo : cfg.algorithms) {
    for (std::uint64_t seed : cfg.seeds) tasks.push_back({algo, seed});
  }

  std::vector<RunResult> results(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  const unsigned threads = resolve_threads(tasks.size());

  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      try {
        results[i] = run_algorithm(cfg, tasks[i].algo, tasks[i].seed);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  const fs::path dir(cfg.output_dir);
  std::map<std::string, std::vector<std::vector<RunRecord>>> by_algo;
  std::map<std::string, std::pair<double, const Matrix*>> best_by_algo;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string name = algorithm_name(tasks[i].algo);
    const std::string stem = name + "_" + std::to_string(tasks[i].seed);
    write_run_csv((dir / ("run_" + stem + ".csv")).string(), results[i].records);
    write_timing_csv((dir / ("timing_" + stem + ".csv")).string(), results[i].records);
    by_algo[name].push_back(results[i].records);
    const double final_best = results[i].records.back().best_reward;
    auto it = best_by_algo.find(name);
    if (it == best_by_algo.end() || final_best > it->second.first) {
      best_by_algo[name] = {final_best, &results[i].best_solution};
    }
  }
  for (const auto& [name, runs] : by_algo) {
    write_aggregate_csv((dir / ("agg_" + name + ".csv")).string(), aggregate_best(runs));
  }
  for (const auto& [name, best] : best_by_algo) {
    if (best.second != nullptr && !best.second->empty()) {
      write_solution_csv((dir / ("best_xi_" + name + ".csv")).string(), *best.second,
                         cfg.environment.actions.labels);
    }
  }
  plot_directory(cfg.output_dir);
}

void aggregate_directory(const std::string& dir) {
  std::map<std::string, std::vector<std::vector<RunRecord>>> by_algo;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) != 0 || entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string().substr(4);
    const std::size_t split = stem.find_last_of('_');
    if (split == std::string::npos) continue;
    by_algo[stem.substr(0, split)].push_back(read_run_csv(entry.path().string()));
  }
  if (by_algo.empty()) throw IoError("aggregate: no run_*.csv files in " + dir);
  for (const auto& [name, runs] : by_algo) {
    write_aggregate_csv((fs::path(dir) / ("agg_" + name + ".csv")).string(),
                        aggregate_best(runs));
  }
}

void plot_directory(const std::string& dir) {
  std::vector<PlotSeries> series;
  std::vector<std::string> solution_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("agg_", 0) == 0 && entry.path().extension() == ".csv") {
      const auto rows = read_aggregate_csv(entry.path().string());
      PlotSeries s;
      s.label = entry.path().stem().string().substr(4);
      for (const AggregateRow& r : rows) {
        s.x.push_back(r.iteration);
        s.y.push_back(r.mean_best);
        s.band.push_back(r.stderr_best);
      }
      series.push_back(std::move(s));
    }
    if (name.rfind("best_xi_", 0) == 0 && entry.path().extension() == ".csv") {
      solution_files.push_back(entry.path().string());
    }
  }
  if (series.empty()) throw IoError("plot: no agg_*.csv files in " + dir);
  std::sort(series.begin(), series.end(),
            [](const PlotSeries& a, const PlotSeries& b) { return a.label < b.label; });
  write_line_plot_svg((fs::path(dir) / "convergence.svg").string(),
                      "best reward, mean over seeds (shaded: standard error)",
                      "iteration", "best reward", series);

  if (!solution_files.empty()) {
    std::string chosen = solution_files.front();
    for (const std::string& f : solution_files) {
      if (f.find("mf_gp_ucb") != std::string::npos) chosen = f;
    }
    const Matrix rows = read_solution_csv(chosen);
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < rows.rows(); ++c) {
      labels.push_back("context " + std::to_string(c));
    }
    write_histogram_svg((fs::path(dir) / "histogram.svg").string(),
                        "best solution action distribution", rows, labels);
  }
}

}  // namespace mfbo::runner
