#pragma once

#include <vector>

#include "mfbo/envs.hpp"
#include "mfbo/record.hpp"

namespace mfbo::runner {

struct OracleResult {
  ConditionalDistribution xi_star;
  double g_star = 0.0;
};

// Exhaustive scan of the per-context simplex grid with `resolution`
// subdivisions per coordinate, evaluating the mean-field value. Guarded to
// tiny instances (|A| * |C| <= 5).
OracleResult brute_force_optimum(const EnvironmentSpec& spec, int resolution);

// Partial sums of (g_star - reward_t).
std::vector<double> regret_curve(const std::vector<RunRecord>& records, double g_star);

}  // namespace mfbo::runner
