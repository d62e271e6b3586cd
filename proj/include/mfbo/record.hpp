#pragma once

#include <vector>

#include "mfbo/linalg.hpp"

namespace mfbo {

// Per-iteration log shared by every optimiser. `reward` is the noiseless
// system reward, `observed_y` the noisy value the algorithm actually saw and
// `wall_ms` the algorithm-side time only (environment evaluation excluded,
// it scales with the population by construction).
struct RunRecord {
  int iteration = 0;
  double reward = 0.0;
  double best_reward = 0.0;
  double observed_y = 0.0;
  double wall_ms = 0.0;
};

// A finished run: the records plus the per-context action distribution of
// the best step found (xi for the GP optimiser, the realised per-context
// frequencies for the joint-space baselines) and, for GP runs, the kernel
// input dimensionality.
struct RunResult {
  std::vector<RunRecord> records;
  Matrix best_solution;
  int gp_input_dim = 0;
};

}  // namespace mfbo
