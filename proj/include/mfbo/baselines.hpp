#pragma once

#include <utility>
#include <vector>

#include "mfbo/envs.hpp"
#include "mfbo/record.hpp"
#include "mfbo/rng.hpp"

namespace mfbo {

struct SaConfig {
  double init_temp = 1.0;
  double cooling = 0.995;
  int moves_per_iter = 1;

  void validate() const;
};

struct GaConfig {
  int pop_size = 20;
  int tournament_k = 3;
  double crossover_rate = 0.9;
  // Per-gene resample probability; a negative value means 1/M.
  double mutation_rate = -1.0;
  int elitism = 1;

  void validate() const;
};

// Contexts for the joint-space baselines are frozen once per run; the
// optimisers then fight the full M-dimensional action vector.
std::vector<std::int32_t> freeze_contexts(const EnvironmentSpec& spec, Rng& rng);

struct BaselineStep {
  PopulationAssignment assignment;
  double system_reward;
  double observed_y;
};

// One random-search proposal: a fresh uniform [0,1]^{|A|} vector per context
// through a softmax, then all agents sampled from it.
BaselineStep random_search_step(const EnvironmentSpec& spec,
                                const std::vector<std::int32_t>& contexts,
                                Rng& proposal_rng, Rng& env_rng);

RunResult random_search_run(const EnvironmentSpec& spec, int budget, Rng& rng);

RunResult simulated_annealing_run(const EnvironmentSpec& spec, const SaConfig& cfg,
                                  int budget, Rng& rng);

RunResult genetic_algorithm_run(const EnvironmentSpec& spec, const GaConfig& cfg,
                                int budget, Rng& rng);

}  // namespace mfbo
