#pragma once

#include <string>
#include <vector>

#include "mfbo/record.hpp"
#include "mfbo/runner/config.hpp"

namespace mfbo::runner {

// One bandit round per iteration: fit the GP to the buffer (uniform xi on
// the cold start), maximise the upper-confidence acquisition, step the
// environment, append the representative's observation.
RunResult run_mf_gp_ucb(const ExperimentConfig& cfg, std::uint64_t seed);

RunResult run_algorithm(const ExperimentConfig& cfg, Algorithm algo, std::uint64_t seed);

struct AggregateRow {
  int iteration = 0;
  double mean_best = 0.0;
  double stderr_best = 0.0;
};

// Per-iteration mean and standard error (sample std / sqrt(n), 0 for n = 1)
// of best_reward across seed runs.
std::vector<AggregateRow> aggregate_best(const std::vector<std::vector<RunRecord>>& runs);

// Runs every configured algorithm over every seed (parallel up to
// MFBO_THREADS), then writes per-seed CSVs, timing CSVs, aggregates, the
// best-solution distributions and the SVG plots into output_dir.
void run_experiment(const ExperimentConfig& cfg);

// Deterministic run/aggregate file contents; timings live in separate files
// because wall time is not reproducible.
void write_run_csv(const std::string& path, const std::vector<RunRecord>& records);
void write_timing_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_run_csv(const std::string& path);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(const std::string& path);
void write_solution_csv(const std::string& path, const Matrix& xi_rows,
                        const std::vector<std::string>& action_labels);
Matrix read_solution_csv(const std::string& path);

// Rebuild agg_<algo>.csv files from the run_<algo>_<seed>.csv files in dir.
void aggregate_directory(const std::string& dir);

// Rebuild convergence.svg / histogram.svg from the CSV files in dir.
void plot_directory(const std::string& dir);

}  // namespace mfbo::runner
