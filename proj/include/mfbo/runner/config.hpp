#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfbo/acquisition.hpp"
#include "mfbo/baselines.hpp"
#include "mfbo/envs.hpp"
#include "mfbo/gp.hpp"

namespace mfbo::runner {

enum class Algorithm { MfGpUcb, Random, SimulatedAnnealing, GeneticAlgorithm };

const char* algorithm_name(Algorithm algo);
Algorithm algorithm_from_name(const std::string& name);

struct KernelConfig {
  // Nonpositive lengthscales resolve to 0.2 x the component's embedding
  // diameter (sqrt(2) for the distribution blocks).
  double lengthscale_action = 0.0;
  double lengthscale_context = 0.0;
  double lengthscale_dist = 0.0;
  double output_scale = 1.0;
  RbfForm rbf_form = RbfForm::SquaredExponential;
  bool standardize_targets = true;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::vector<Algorithm> algorithms;
  int budget_t = 250;
  std::vector<std::uint64_t> seeds;
  KernelConfig kernel;
  // Negative means: use the environment's noise_std, floored at 1e-3 so the
  // Gram matrix stays well conditioned on noise-free environments.
  double gp_noise_std = -1.0;
  BetaScheduleParams beta;
  AcqOptConfig acq;
  SaConfig sa;
  GaConfig ga;
  int oracle_resolution = 20;
  std::string output_dir = "out";
};

// Reads the experiment JSON; data files referenced inside are resolved
// relative to the config file's directory.
ExperimentConfig load_experiment_config(const std::string& path);

KernelParams resolve_kernel(const KernelConfig& cfg, const EnvironmentSpec& env);
double resolve_gp_noise(const ExperimentConfig& cfg);

// Actions as n equally spaced angles over [0, 2pi], embeddings 1-D.
ActionSet make_angle_actions(int num_actions);

}  // namespace mfbo::runner
