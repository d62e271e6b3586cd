#include "mfbo/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfbo {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void push_record(std::vector<RunRecord>& records, const BaselineStep& step,
                 double wall_ms) {
  RunRecord rec;
  rec.iteration = static_cast<int>(records.size()) + 1;
  rec.reward = step.system_reward;
  rec.observed_y = step.observed_y;
  rec.best_reward = records.empty() ? step.system_reward
                                    : std::max(records.back().best_reward, step.system_reward);
  rec.wall_ms = wall_ms;
  records.push_back(rec);
}

Matrix per_context_solution(const PopulationAssignment& pop, const EnvironmentSpec& spec) {
  return empirical_distribution(pop, spec.actions.size(), EmpiricalScope::PerContext,
                                spec.contexts.size());
}

struct BestTracker {
  double reward = -std::numeric_limits<double>::infinity();
  PopulationAssignment assignment;

  void offer(double system_reward, const PopulationAssignment& pop) {
    if (system_reward > reward) {
      reward = system_reward;
      assignment = pop;
    }
  }
};

}  // namespace

void SaConfig::validate() const {
  if (!(init_temp > 0.0)) throw std::invalid_argument("SaConfig: init_temp must be > 0");
  if (!(cooling > 0.0 && cooling < 1.0)) {
    throw std::invalid_argument("SaConfig: cooling must lie in (0,1)");
  }
  if (moves_per_iter < 1) throw std::invalid_argument("SaConfig: moves_per_iter must be >= 1");
}

void GaConfig::validate() const {
  if (pop_size < 2) throw std::invalid_argument("GaConfig: pop_size must be >= 2");
  if (tournament_k < 1 || tournament_k > pop_size) {
    throw std::invalid_argument("GaConfig: tournament_k must lie in [1, pop_size]");
  }
  if (crossover_rate < 0.0 || crossover_rate > 1.0) {
    throw std::invalid_argument("GaConfig: crossover_rate must lie in [0,1]");
  }
  if (elitism < 0 || elitism > pop_size) {
    throw std::invalid_argument("GaConfig: elitism must lie in [0, pop_size]");
  }
}

std::vector<std::int32_t> freeze_contexts(const EnvironmentSpec& spec, Rng& rng) {
  std::vector<std::int32_t> contexts(spec.population_m);
  for (auto& c : contexts) {
    c = static_cast<std::int32_t>(rng.categorical(spec.contexts.probs));
  }
  return contexts;
}

BaselineStep random_search_step(const EnvironmentSpec& spec,
                                const std::vector<std::int32_t>& contexts,
                                Rng& proposal_rng, Rng& env_rng) {
  const int num_actions = spec.actions.size();
  const int num_contexts = spec.contexts.size();

  Matrix logits(num_contexts, num_actions);
  for (int c = 0; c < num_contexts; ++c) {
    for (int a = 0; a < num_actions; ++a) logits(c, a) = proposal_rng.uniform();
  }
  const ConditionalDistribution xi = softmax_rows(Logits{std::move(logits)});

  BaselineStep step;
  step.assignment.context_idx = contexts;
  step.assignment.action_idx.resize(contexts.size());
  for (std::size_t m = 0; m < contexts.size(); ++m) {
    step.assignment.action_idx[m] =
        static_cast<std::int32_t>(proposal_rng.categorical(xi.row(contexts[m])));
  }
  const EvalOutcome eval = evaluate_assignment(spec, step.assignment, env_rng);
  step.system_reward = eval.system_reward;
  step.observed_y = eval.observed_y;
  return step;
}

RunResult random_search_run(const EnvironmentSpec& spec, int budget, Rng& rng) {
  if (budget < 1) throw std::invalid_argument("random_search_run: budget must be >= 1");
  Rng proposal_rng = rng.derive(1);
  Rng env_rng = rng.derive(2);
  const std::vector<std::int32_t> contexts = freeze_contexts(spec, proposal_rng);

  RunResult result;
  BestTracker best;
  for (int t = 0; t < budget; ++t) {
    const auto start = Clock::now();
    BaselineStep step = random_search_step(spec, contexts, proposal_rng, env_rng);
    best.offer(step.system_reward, step.assignment);
    push_record(result.records, step, ms_since(start));
  }
  result.best_solution = per_context_solution(best.assignment, spec);
  return result;
}

RunResult simulated_annealing_run(const EnvironmentSpec& spec, const SaConfig& cfg,
                                  int budget, Rng& rng) {
  cfg.validate();
  if (budget < 1) throw std::invalid_argument("simulated_annealing_run: budget must be >= 1");
  Rng proposal_rng = rng.derive(1);
  Rng env_rng = rng.derive(2);
  const int num_actions = spec.actions.size();

  PopulationAssignment state;
  state.context_idx = freeze_contexts(spec, proposal_rng);
  state.action_idx.resize(spec.population_m);
  for (auto& a : state.action_idx) {
    a = static_cast<std::int32_t>(proposal_rng.uniform_int(num_actions));
  }

  RunResult result;
  BestTracker best;
  double temp = cfg.init_temp;

  auto start = Clock::now();
  EvalOutcome current = evaluate_assignment(spec, state, env_rng);
  best.offer(current.system_reward, state);
  push_record(result.records, {state, current.system_reward, current.observed_y},
              ms_since(start));
  temp *= cfg.cooling;

  for (int t = 1; t < budget; ++t) {
    start = Clock::now();
    PopulationAssignment proposal = state;
    for (int k = 0; k < cfg.moves_per_iter; ++k) {
      const int agent = proposal_rng.uniform_int(spec.population_m);
      proposal.action_idx[agent] =
          static_cast<std::int32_t>(proposal_rng.uniform_int(num_actions));
    }
    const double wall = ms_since(start);
    const EvalOutcome eval = evaluate_assignment(spec, proposal, env_rng);

    const double delta = eval.observed_y - current.observed_y;
    bool accept = delta >= 0.0;
    if (!accept && temp > 0.0) {
      accept = proposal_rng.uniform() < std::exp(delta / temp);
    }
    if (accept) {
      state = std::move(proposal);
      current = eval;
    }
    best.offer(eval.system_reward, accept ? state : proposal);
    push_record(result.records, {state, eval.system_reward, eval.observed_y}, wall);
    temp *= cfg.cooling;
  }
  result.best_solution = per_context_solution(best.assignment, spec);
  return result;
}

RunResult genetic_algorithm_run(const EnvironmentSpec& spec, const GaConfig& cfg,
                                int budget, Rng& rng) {
  cfg.validate();
  if (budget < cfg.pop_size) {
    throw std::invalid_argument("genetic_algorithm_run: budget must be >= pop_size");
  }
  Rng proposal_rng = rng.derive(1);
  Rng env_rng = rng.derive(2);
  const int num_actions = spec.actions.size();
  const int population_m = spec.population_m;
  const double mutation_rate =
      cfg.mutation_rate < 0.0 ? 1.0 / population_m : cfg.mutation_rate;
  const std::vector<std::int32_t> contexts = freeze_contexts(spec, proposal_rng);

  struct Individual {
    std::vector<std::int32_t> genes;
    double fitness = 0.0;       // observed, drives selection
    double system_reward = 0.0;
  };

  RunResult result;
  BestTracker best;
  int evals = 0;

  auto evaluate = [&](Individual& ind, double wall_ms) {
    PopulationAssignment pop;
    pop.context_idx = contexts;
    pop.action_idx = ind.genes;
    const EvalOutcome eval = evaluate_assignment(spec, pop, env_rng);
    ind.fitness = eval.observed_y;
    ind.system_reward = eval.system_reward;
    best.offer(eval.system_reward, pop);
    push_record(result.records, {std::move(pop), eval.system_reward, eval.observed_y},
                wall_ms);
    ++evals;
  };

  std::vector<Individual> population(cfg.pop_size);
  for (auto& ind : population) {
    const auto start = Clock::now();
    ind.genes.resize(population_m);
    for (auto& g : ind.genes) {
      g = static_cast<std::int32_t>(proposal_rng.uniform_int(num_actions));
    }
    evaluate(ind, ms_since(start));
    if (evals == budget) break;
  }

  auto tournament = [&]() -> const Individual& {
    int winner = proposal_rng.uniform_int(cfg.pop_size);
    for (int k = 1; k < cfg.tournament_k; ++k) {
      const int challenger = proposal_rng.uniform_int(cfg.pop_size);
      if (population[challenger].fitness > population[winner].fitness) {
        winner = challenger;
      }
    }
    return population[winner];
  };

  while (evals < budget) {
    const int evals_before = evals;
    std::vector<int> order(cfg.pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return population[a].fitness > population[b].fitness;
    });

    std::vector<Individual> next;
    next.reserve(cfg.pop_size);
    for (int e = 0; e < cfg.elitism; ++e) next.push_back(population[order[e]]);

    while (static_cast<int>(next.size()) < cfg.pop_size && evals < budget) {
      const auto start = Clock::now();
      const Individual& parent_a = tournament();
      const Individual& parent_b = tournament();
      Individual child;
      child.genes = parent_a.genes;
      if (proposal_rng.uniform() < cfg.crossover_rate) {
        for (int g = 0; g < population_m; ++g) {
          if (proposal_rng.uniform() < 0.5) child.genes[g] = parent_b.genes[g];
        }
      }
      for (int g = 0; g < population_m; ++g) {
        if (proposal_rng.uniform() < mutation_rate) {
          child.genes[g] = static_cast<std::int32_t>(proposal_rng.uniform_int(num_actions));
        }
      }
      evaluate(child, ms_since(start));
      next.push_back(std::move(child));
    }
    if (static_cast<int>(next.size()) == cfg.pop_size) {
      population = std::move(next);
    }
    // all-elite generations make no progress; stop instead of spinning
    if (evals == evals_before) break;
  }
  result.best_solution = per_context_solution(best.assignment, spec);
  return result;
}

}  // namespace mfbo
