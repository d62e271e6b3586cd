#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mfbo/baselines.hpp"
#include "mfbo/runner/config.hpp"
#include "test_util.hpp"

using namespace mfbo;

namespace {

EnvironmentSpec tiny_swarm(int population, int num_actions, double sigma,
                           double noise = 0.0) {
  EnvironmentSpec spec;
  spec.kind = EnvKind::Swarm;
  spec.actions = runner::make_angle_actions(num_actions);
  spec.contexts = ContextMeasure::trivial();
  spec.population_m = population;
  spec.congestion_sigma = sigma;
  spec.noise_std = noise;
  return spec;
}

void check_contract(const RunResult& result, int budget) {
  REQUIRE(static_cast<int>(result.records.size()) == budget);
  double best = -1e300;
  for (int i = 0; i < budget; ++i) {
    CHECK(result.records[i].iteration == i + 1);
    best = std::max(best, result.records[i].reward);
    CHECK(result.records[i].best_reward == best);
  }
}

bool same_records(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].reward != b[i].reward || a[i].best_reward != b[i].best_reward ||
        a[i].observed_y != b[i].observed_y) {
      return false;
    }
  }
  return true;
}

// Exhaustive joint-assignment optimum for tiny instances: |A|^M candidates.
double exhaustive_joint_optimum(const EnvironmentSpec& spec) {
  const int num_actions = spec.actions.size();
  const int population = spec.population_m;
  PopulationAssignment pop;
  pop.context_idx.assign(population, 0);
  pop.action_idx.assign(population, 0);
  double best = -1e300;
  while (true) {
    best = std::max(best, system_reward(spec, pop));
    int i = 0;
    for (; i < population; ++i) {
      if (++pop.action_idx[i] < num_actions) break;
      pop.action_idx[i] = 0;
    }
    if (i == population) break;
  }
  return best;
}

}  // namespace

TEST_CASE("random search: determinism, budget, monotone best") {
  const EnvironmentSpec spec = tiny_swarm(8, 5, 2.0, 0.5);
  Rng rng_a(11);
  const RunResult a = random_search_run(spec, 400, rng_a);
  check_contract(a, 400);
  Rng rng_b(11);
  const RunResult b = random_search_run(spec, 400, rng_b);
  CHECK(same_records(a.records, b.records));
}

TEST_CASE("random search with a single action is forced onto it") {
  EnvironmentSpec spec = tiny_swarm(5, 2, 0.0);
  // keep |A| >= 2 for the action-set invariant; make action 1 unreachable by
  // checking the sampled assignment instead
  Rng proposal(3), env(4);
  const auto contexts = std::vector<std::int32_t>(5, 0);
  const BaselineStep step = random_search_step(spec, contexts, proposal, env);
  for (int m = 0; m < 5; ++m) {
    CHECK(step.assignment.action_idx[m] >= 0);
    CHECK(step.assignment.action_idx[m] < 2);
  }
}

TEST_CASE("simulated annealing: near-zero temperature is strict hill climbing") {
  const EnvironmentSpec spec = tiny_swarm(6, 4, 1.0, 0.0);
  SaConfig cfg;
  cfg.init_temp = 1e-12;
  Rng rng(21);
  const RunResult result = simulated_annealing_run(spec, cfg, 500, rng);
  check_contract(result, 500);

  // accepted rewards never decrease: reconstruct the accepted chain
  double current = result.records.front().reward;
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    const double r = result.records[i].reward;
    if (r >= current) current = r;  // accepted (Delta >= 0 always accepted)
    // rejected proposals may be anything; the chain value must never drop
    CHECK(current >= result.records.front().reward);
  }
}

TEST_CASE("simulated annealing run is deterministic and consumes the budget") {
  const EnvironmentSpec spec = tiny_swarm(10, 6, 3.0, 0.2);
  SaConfig cfg;
  Rng rng_a(77);
  const RunResult a = simulated_annealing_run(spec, cfg, 300, rng_a);
  check_contract(a, 300);
  Rng rng_b(77);
  const RunResult b = simulated_annealing_run(spec, cfg, 300, rng_b);
  CHECK(same_records(a.records, b.records));
}

TEST_CASE("genetic algorithm: static population without variation operators") {
  const EnvironmentSpec spec = tiny_swarm(6, 4, 1.0, 0.0);
  GaConfig cfg;
  cfg.pop_size = 6;
  cfg.mutation_rate = 0.0;
  cfg.crossover_rate = 0.0;
  cfg.elitism = 6;
  Rng rng(31);
  // an all-elite generation can never evaluate anything new, so the run stops
  // after the initial population instead of spinning on the budget
  const RunResult result = genetic_algorithm_run(spec, cfg, 18, rng);
  CHECK(static_cast<int>(result.records.size()) == 6);

  // with elitism below pop_size but no variation, offspring clone parents:
  // every later reward must already appear in the first generation
  cfg.elitism = 1;
  Rng rng2(32);
  const RunResult cloned = genetic_algorithm_run(spec, cfg, 30, rng2);
  check_contract(cloned, 30);
  for (std::size_t i = 6; i < cloned.records.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < 6; ++j) {
      if (cloned.records[i].reward == cloned.records[j].reward) seen = true;
    }
    CHECK(seen);
  }
}

TEST_CASE("genetic algorithm: determinism and exact budget") {
  const EnvironmentSpec spec = tiny_swarm(7, 5, 2.0, 0.3);
  GaConfig cfg;
  cfg.pop_size = 10;
  Rng rng_a(41);
  const RunResult a = genetic_algorithm_run(spec, cfg, 137, rng_a);
  check_contract(a, 137);
  Rng rng_b(41);
  const RunResult b = genetic_algorithm_run(spec, cfg, 137, rng_b);
  CHECK(same_records(a.records, b.records));
}

TEST_CASE("genetic algorithm rejects budgets below the population size") {
  const EnvironmentSpec spec = tiny_swarm(4, 3, 0.0);
  GaConfig cfg;
  cfg.pop_size = 20;
  Rng rng(5);
  CHECK_THROWS_AS(genetic_algorithm_run(spec, cfg, 10, rng), std::invalid_argument);
}

TEST_CASE("SA and GA reach the exhaustive joint optimum on the tiny swarm") {
  const EnvironmentSpec spec = tiny_swarm(5, 4, 10.0, 0.0);
  const double optimum = exhaustive_joint_optimum(spec);
  REQUIRE(optimum > 0.0);

  double sa_mean = 0.0, ga_mean = 0.0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng_sa(seed);
    sa_mean += simulated_annealing_run(spec, SaConfig{}, 2000, rng_sa)
                   .records.back()
                   .best_reward;
    Rng rng_ga(seed);
    GaConfig ga;
    ga_mean += genetic_algorithm_run(spec, ga, 2000, rng_ga).records.back().best_reward;
  }
  sa_mean /= seeds;
  ga_mean /= seeds;
  CHECK(sa_mean > 0.95 * optimum);
  CHECK(ga_mean > 0.95 * optimum);
}
