#include "mfbo/envs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mfbo/errors.hpp"

namespace mfbo {

namespace {

constexpr double kSimplexTol = 1e-9;

// Per-agent swarm payoff over angles.
double swarm_agent_reward(double angle) {
  const double s = std::sin(angle);
  const double c = std::cos(angle);
  return 2.0 * std::numbers::pi * std::numbers::pi * (s - c * c) + 2.0 * s;
}

double congestion_penalty(std::span<const double> freq, double sigma) {
  double acc = 0.0;
  for (double f : freq) acc += std::log(f + 1.0);
  return sigma * acc;
}

std::vector<double> action_counts(const PopulationAssignment& pop, int num_actions) {
  std::vector<double> counts(num_actions, 0.0);
  for (int m = 0; m < pop.size(); ++m) counts[pop.action_idx[m]] += 1.0;
  return counts;
}

}  // namespace

void EnvironmentSpec::validate() const {
  actions.validate();
  contexts.validate();
  if (population_m < 1) throw std::invalid_argument("EnvironmentSpec: population_m must be >= 1");
  if (noise_std < 0.0) throw std::invalid_argument("EnvironmentSpec: noise_std must be >= 0");
  if (kind == EnvKind::DemandMatching) {
    if (static_cast<int>(demand.size()) != actions.size()) {
      throw DimensionError("EnvironmentSpec: demand length must equal |A|");
    }
    double total = 0.0;
    for (double d : demand) {
      if (d < 0.0) throw std::invalid_argument("EnvironmentSpec: demand entries must be >= 0");
      total += d;
    }
    if (std::abs(total - 1.0) > kSimplexTol) {
      throw std::invalid_argument("EnvironmentSpec: demand must sum to 1");
    }
  }
  if (kind == EnvKind::Maritime) {
    if (static_cast<int>(port_capacity.size()) != actions.size() ||
        static_cast<int>(port_region.size()) != actions.size()) {
      throw DimensionError("EnvironmentSpec: port_capacity/port_region length must equal |A|");
    }
    double total = 0.0;
    for (double v : port_capacity) {
      if (!(v > 0.0)) throw std::invalid_argument("EnvironmentSpec: port capacities must be > 0");
      total += v;
    }
    if (std::abs(total - 1.0) > kSimplexTol) {
      throw std::invalid_argument("EnvironmentSpec: port capacities must sum to 1");
    }
    for (int r : port_region) {
      if (r < 0 || r >= contexts.size()) {
        throw std::invalid_argument("EnvironmentSpec: port_region entry out of range");
      }
    }
  }
  if (deterministic_mode && kind != EnvKind::DemandMatching) {
    throw std::invalid_argument("EnvironmentSpec: deterministic_mode is DemandMatching-only");
  }
}

double swarm_reward(const PopulationAssignment& pop, const ActionSet& actions,
                    double sigma) {
  const int num_actions = actions.size();
  const std::vector<double> counts = action_counts(pop, num_actions);
  double reward = 0.0;
  std::vector<double> freq(num_actions);
  for (int a = 0; a < num_actions; ++a) {
    reward += counts[a] * swarm_agent_reward(actions.embeddings[a][0]);
    freq[a] = counts[a] / pop.size();
  }
  return reward - congestion_penalty(freq, sigma);
}

double arena_reward(const PopulationAssignment& pop, const ContextMeasure& contexts,
                    const ActionSet& actions, double sigma) {
  const int population = pop.size();
  if (population < 2) {
    throw std::invalid_argument("arena_reward: needs at least two agents");
  }
  const int num_actions = actions.size();
  const int num_contexts = contexts.size();

  Matrix cell_counts(num_contexts, num_actions);
  for (int m = 0; m < population; ++m) {
    cell_counts(pop.context_idx[m], pop.action_idx[m]) += 1.0;
  }

  // sum_{i != j, unordered} c_i c_j cos(x_i - x_j)
  //   = [ (sum_i c_i cos x_i)^2 + (sum_i c_i sin x_i)^2 - sum_i c_i^2 ] / 2,
  // accumulated over cells so agent order never enters.
  double sum_cos = 0.0, sum_sin = 0.0, sum_sq = 0.0;
  for (int c = 0; c < num_contexts; ++c) {
    const double cv = contexts.embeddings[c][0];
    for (int a = 0; a < num_actions; ++a) {
      const double n = cell_counts(c, a);
      if (n == 0.0) continue;
      const double angle = actions.embeddings[a][0];
      sum_cos += n * cv * std::cos(angle);
      sum_sin += n * cv * std::sin(angle);
      sum_sq += n * cv * cv;
    }
  }
  const double pairs = 0.5 * population * (population - 1.0);
  const double pair_term =
      0.5 * (sum_cos * sum_cos + sum_sin * sum_sin - sum_sq) / pairs;

  std::vector<double> freq = action_counts(pop, num_actions);
  for (double& f : freq) f /= population;
  return pair_term - congestion_penalty(freq, sigma);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("kl_divergence: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("js_divergence: length mismatch");
  std::vector<double> mix(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mix[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl_divergence(p, mix) + 0.5 * kl_divergence(q, mix);
}

double demand_matching_reward(const PopulationAssignment& pop,
                              std::span<const double> demand) {
  const Matrix freq = empirical_distribution(pop, static_cast<int>(demand.size()),
                                             EmpiricalScope::Global);
  return -js_divergence(freq.row_span(0), demand);
}

double maritime_reward(const PopulationAssignment& pop, const EnvironmentSpec& spec) {
  if (spec.kind != EnvKind::Maritime) {
    throw std::invalid_argument("maritime_reward: spec kind is not Maritime");
  }
  const int population = pop.size();
  const int num_actions = spec.actions.size();
  const std::vector<double> counts = action_counts(pop, num_actions);

  double congestion = 0.0;
  for (int a = 0; a < num_actions; ++a) {
    if (counts[a] == 0.0) continue;
    if (!(spec.port_capacity[a] > 0.0)) {
      throw std::invalid_argument("maritime_reward: occupied port has zero capacity");
    }
    congestion += counts[a] * (counts[a] / population) / spec.port_capacity[a];
  }
  double matches = 0.0;
  for (int m = 0; m < population; ++m) {
    if (spec.port_region[pop.action_idx[m]] == pop.context_idx[m]) matches += 1.0;
  }
  return (-0.5 * population - congestion + matches) / population;
}

double system_reward(const EnvironmentSpec& spec, const PopulationAssignment& pop) {
  switch (spec.kind) {
    case EnvKind::Swarm:
      return swarm_reward(pop, spec.actions, spec.congestion_sigma);
    case EnvKind::Arena:
      return arena_reward(pop, spec.contexts, spec.actions, spec.congestion_sigma);
    case EnvKind::DemandMatching:
      return demand_matching_reward(pop, spec.demand);
    case EnvKind::Maritime:
      return maritime_reward(pop, spec);
  }
  throw std::logic_error("system_reward: unknown environment kind");
}

EvalOutcome evaluate_assignment(const EnvironmentSpec& spec,
                                const PopulationAssignment& pop, Rng& rng) {
  const double reward = system_reward(spec, pop);
  double observed = reward;
  if (spec.noise_std > 0.0) observed += spec.noise_std * rng.normal();
  return {reward, observed};
}

StepOutcome env_step(const EnvironmentSpec& spec, const ConditionalDistribution& xi,
                     Rng& rng) {
  if (xi.num_actions() != spec.actions.size() ||
      xi.num_contexts() != spec.contexts.size()) {
    throw DimensionError("env_step: xi shape does not match environment");
  }
  StepOutcome out;
  out.assignment = sample_population(xi, spec.contexts, spec.population_m, rng);
  if (spec.kind == EnvKind::DemandMatching && spec.deterministic_mode) {
    const std::vector<double> marginal = marginal_action_distribution(xi, spec.contexts);
    out.system_reward = -js_divergence(marginal, spec.demand);
  } else {
    out.system_reward = system_reward(spec, out.assignment);
  }
  out.representative_idx = rng.uniform_int(spec.population_m);
  out.observed_y = out.system_reward;
  if (spec.noise_std > 0.0) out.observed_y += spec.noise_std * rng.normal();
  return out;
}

double mean_field_value(const EnvironmentSpec& spec, const ConditionalDistribution& xi) {
  return mean_field_value(spec, xi.rows());
}

double mean_field_value(const EnvironmentSpec& spec, const Matrix& xi_rows) {
  const int num_actions = spec.actions.size();
  std::vector<double> marginal(num_actions, 0.0);
  for (int c = 0; c < spec.contexts.size(); ++c) {
    for (int a = 0; a < num_actions; ++a) {
      marginal[a] += spec.contexts.probs[c] * xi_rows(c, a);
    }
  }
  switch (spec.kind) {
    case EnvKind::Swarm: {
      double reward = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        reward += marginal[a] * swarm_agent_reward(spec.actions.embeddings[a][0]);
      }
      return spec.population_m * reward - congestion_penalty(marginal, spec.congestion_sigma);
    }
    case EnvKind::Arena: {
      const double population = spec.population_m;
      if (population < 2) throw std::invalid_argument("mean_field_value: arena needs M >= 2");
      double sum_cos = 0.0, sum_sin = 0.0, sum_sq = 0.0;
      for (int c = 0; c < spec.contexts.size(); ++c) {
        const double cv = spec.contexts.embeddings[c][0];
        const double pc = spec.contexts.probs[c];
        for (int a = 0; a < num_actions; ++a) {
          const double n = population * pc * xi_rows(c, a);
          const double angle = spec.actions.embeddings[a][0];
          sum_cos += n * cv * std::cos(angle);
          sum_sin += n * cv * std::sin(angle);
          sum_sq += n * cv * cv;
        }
      }
      const double pairs = 0.5 * population * (population - 1.0);
      const double pair_term =
          0.5 * (sum_cos * sum_cos + sum_sin * sum_sin - sum_sq) / pairs;
      return pair_term - congestion_penalty(marginal, spec.congestion_sigma);
    }
    case EnvKind::DemandMatching:
      return -js_divergence(marginal, spec.demand);
    case EnvKind::Maritime: {
      double congestion = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        if (marginal[a] == 0.0) continue;
        if (!(spec.port_capacity[a] > 0.0)) {
          throw std::invalid_argument("mean_field_value: occupied port has zero capacity");
        }
        congestion += marginal[a] * marginal[a] / spec.port_capacity[a];
      }
      double matches = 0.0;
      for (int c = 0; c < spec.contexts.size(); ++c) {
        for (int a = 0; a < num_actions; ++a) {
          if (spec.port_region[a] == c) matches += spec.contexts.probs[c] * xi_rows(c, a);
        }
      }
      return -0.5 - congestion + matches;
    }
  }
  throw std::logic_error("mean_field_value: unknown environment kind");
}

}  // namespace mfbo
