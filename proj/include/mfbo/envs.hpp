#pragma once

#include <span>
#include <vector>

#include "mfbo/meanfield.hpp"
#include "mfbo/rng.hpp"

namespace mfbo {

enum class EnvKind { Swarm, Arena, DemandMatching, Maritime };

// A black-box payoff: action set, context measure, population size and the
// per-kind reward parameters.
struct EnvironmentSpec {
  EnvKind kind = EnvKind::Swarm;
  ActionSet actions;
  ContextMeasure contexts;
  int population_m = 1;
  double noise_std = 0.0;
  double congestion_sigma = 0.0;           // Swarm / Arena
  std::vector<double> demand;              // DemandMatching, length |A|
  std::vector<double> port_capacity;       // Maritime, length |A|, sums to 1
  std::vector<int> port_region;            // Maritime, entries in [0, |C|)
  bool deterministic_mode = false;         // DemandMatching only

  void validate() const;
};

// Protocol outcome of one round: the representative agent's noisy payoff,
// the noiseless system reward and the realised assignment.
struct StepOutcome {
  double observed_y = 0.0;
  double system_reward = 0.0;
  PopulationAssignment assignment;
  int representative_idx = 0;
};

// Per-agent angle payoff summed over the population minus the congestion
// penalty sigma * sum_x log(P_x + 1) on global action frequencies.
double swarm_reward(const PopulationAssignment& pop, const ActionSet& actions,
                    double sigma);

// Pairwise context-weighted cosine alignment over unordered agent pairs,
// normalised by C(M,2), minus the same congestion penalty. Evaluated from
// per-(context, action) histograms rather than the O(M^2) double loop.
double arena_reward(const PopulationAssignment& pop, const ContextMeasure& contexts,
                    const ActionSet& actions, double sigma);

// sum_i p_i ln(p_i / q_i), 0 ln 0 = 0. Returns +infinity when p has mass
// where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// 0.5 KL(p || h) + 0.5 KL(q || h) with h the even mixture; in [0, ln 2].
double js_divergence(std::span<const double> p, std::span<const double> q);

double demand_matching_reward(const PopulationAssignment& pop,
                              std::span<const double> demand);

// (1/M) sum_m [ -0.5 - P_{x_m} / V_{x_m} + 1{region(x_m) = c_m} ].
double maritime_reward(const PopulationAssignment& pop, const EnvironmentSpec& spec);

// Noiseless system reward of a realised assignment under the spec's kind.
double system_reward(const EnvironmentSpec& spec, const PopulationAssignment& pop);

// Assignment evaluation as the black box sees it: system reward plus one
// Gaussian noise draw.
struct EvalOutcome {
  double system_reward;
  double observed_y;
};
EvalOutcome evaluate_assignment(const EnvironmentSpec& spec,
                                const PopulationAssignment& pop, Rng& rng);

// One bandit round: sample the population from xi, evaluate, draw the
// representative agent. In deterministic mode (DemandMatching) the reward is
// computed from the exact marginal instead of the sampled frequencies.
StepOutcome env_step(const EnvironmentSpec& spec, const ConditionalDistribution& xi,
                     Rng& rng);

// Reward at the mean-field limit: histograms replaced by xi exactly. Used by
// the brute-force oracle and the deterministic tests. The Matrix overload
// skips simplex validation (the oracle scans grids of candidates).
double mean_field_value(const EnvironmentSpec& spec, const ConditionalDistribution& xi);
double mean_field_value(const EnvironmentSpec& spec, const Matrix& xi_rows);

}  // namespace mfbo
