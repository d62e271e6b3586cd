#include <doctest.h>

#include <cmath>

#include "mfbo/meanfield.hpp"
#include "mfbo/rng.hpp"

using namespace mfbo;

TEST_CASE("softmax of zero logits is uniform") {
  Logits logits{Matrix(3, 4)};
  const ConditionalDistribution xi = softmax_rows(logits);
  for (int c = 0; c < 3; ++c) {
    for (int a = 0; a < 4; ++a) CHECK(xi(c, a) == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("softmax matches hand arithmetic on [ln2, 0, 0]") {
  Logits logits{Matrix(1, 3)};
  logits.theta(0, 0) = std::log(2.0);
  const ConditionalDistribution xi = softmax_rows(logits);
  CHECK(xi(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(xi(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(xi(0, 2) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("softmax is shift invariant and survives extreme logits") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int num_actions = 2 + rng.uniform_int(6);
    Logits a{Matrix(1, num_actions)};
    Logits b{Matrix(1, num_actions)};
    for (int i = 0; i < num_actions; ++i) {
      a.theta(0, i) = rng.uniform(-500.0, 500.0);
      b.theta(0, i) = a.theta(0, i) + 100.0;
    }
    const auto xa = softmax_rows(a);
    const auto xb = softmax_rows(b);
    double total = 0.0;
    for (int i = 0; i < num_actions; ++i) {
      CHECK(std::abs(xa(0, i) - xb(0, i)) < 1e-12);
      CHECK(xa(0, i) >= 0.0);
      total += xa(0, i);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("sample_population is deterministic and respects point masses") {
  ContextMeasure p;
  p.embeddings = {{0.0}, {1.0}};
  p.probs = {0.3, 0.7};

  Matrix rows(2, 5);
  rows(0, 3) = 1.0;
  rows(1, 3) = 1.0;
  const ConditionalDistribution xi(std::move(rows));

  Rng rng_a(123);
  Rng rng_b(123);
  const auto pop_a = sample_population(xi, p, 200, rng_a);
  const auto pop_b = sample_population(xi, p, 200, rng_b);
  CHECK(pop_a.context_idx == pop_b.context_idx);
  CHECK(pop_a.action_idx == pop_b.action_idx);
  for (int m = 0; m < pop_a.size(); ++m) CHECK(pop_a.action_idx[m] == 3);
}

TEST_CASE("sampled frequencies concentrate around the distribution") {
  const auto xi = ConditionalDistribution::uniform(1, 2);
  Rng rng(2024);
  const auto pop = sample_population(xi, ContextMeasure::trivial(), 10000, rng);
  const Matrix freq = empirical_distribution(pop, 2, EmpiricalScope::Global);
  CHECK(std::abs(freq(0, 0) - 0.5) < 0.02);
}

TEST_CASE("marginal frequencies converge to xi weighted by p") {
  ContextMeasure p;
  p.embeddings = {{0.0}, {1.0}};
  p.probs = {0.25, 0.75};
  Matrix rows(2, 3);
  rows(0, 0) = 0.6;
  rows(0, 1) = 0.3;
  rows(0, 2) = 0.1;
  rows(1, 0) = 0.1;
  rows(1, 1) = 0.2;
  rows(1, 2) = 0.7;
  const ConditionalDistribution xi(std::move(rows));
  const auto marginal = marginal_action_distribution(xi, p);

  const int population = 100000;
  Rng rng(5);
  const auto pop = sample_population(xi, p, population, rng);
  const Matrix freq = empirical_distribution(pop, 3, EmpiricalScope::Global);
  for (int a = 0; a < 3; ++a) {
    const double sd = std::sqrt(marginal[a] * (1.0 - marginal[a]) / population);
    CHECK(std::abs(freq(0, a) - marginal[a]) < 3.0 * sd + 1e-12);
  }
}

TEST_CASE("empirical_distribution counts match the brute-force oracle") {
  PopulationAssignment pop;
  pop.context_idx = {0, 0, 0, 0};
  pop.action_idx = {0, 0, 1, 2};
  const Matrix global = empirical_distribution(pop, 3, EmpiricalScope::Global);
  CHECK(global(0, 0) == 0.5);
  CHECK(global(0, 1) == 0.25);
  CHECK(global(0, 2) == 0.25);

  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int num_actions = 2 + rng.uniform_int(4);
    const int num_contexts = 1 + rng.uniform_int(3);
    const int population = 1 + rng.uniform_int(40);
    PopulationAssignment random_pop;
    for (int m = 0; m < population; ++m) {
      random_pop.context_idx.push_back(rng.uniform_int(num_contexts));
      random_pop.action_idx.push_back(rng.uniform_int(num_actions));
    }
    const Matrix per_ctx = empirical_distribution(random_pop, num_actions,
                                                  EmpiricalScope::PerContext, num_contexts);
    for (int c = 0; c < num_contexts; ++c) {
      int ctx_count = 0;
      for (int m = 0; m < population; ++m) {
        if (random_pop.context_idx[m] == c) ++ctx_count;
      }
      for (int a = 0; a < num_actions; ++a) {
        int count = 0;
        for (int m = 0; m < population; ++m) {
          if (random_pop.context_idx[m] == c && random_pop.action_idx[m] == a) ++count;
        }
        const double expected =
            ctx_count == 0 ? 0.0 : static_cast<double>(count) / ctx_count;
        CHECK(per_ctx(c, a) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("single-action population puts all mass on that action") {
  PopulationAssignment pop;
  pop.context_idx = {0, 0, 0};
  pop.action_idx = {1, 1, 1};
  const Matrix freq = empirical_distribution(pop, 4, EmpiricalScope::Global);
  CHECK(freq(0, 1) == 1.0);
  CHECK(freq(0, 0) == 0.0);
  CHECK(freq(0, 2) == 0.0);
  CHECK(freq(0, 3) == 0.0);
}

TEST_CASE("flatten is context-major and round-trips exactly") {
  Matrix rows(2, 2);
  rows(0, 0) = 0.25;
  rows(0, 1) = 0.75;
  rows(1, 0) = 0.9;
  rows(1, 1) = 0.1;
  const ConditionalDistribution xi(std::move(rows));
  const auto flat = flatten_distribution(xi);
  CHECK(flat == std::vector<double>{0.25, 0.75, 0.9, 0.1});
  CHECK(unflatten_distribution(flat, 2, 2) == xi);

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int num_contexts = 1 + rng.uniform_int(4);
    const int num_actions = 2 + rng.uniform_int(5);
    Logits logits{Matrix(num_contexts, num_actions)};
    for (std::size_t i = 0; i < logits.theta.rows(); ++i) {
      for (std::size_t j = 0; j < logits.theta.cols(); ++j) {
        logits.theta(i, j) = rng.normal();
      }
    }
    const auto gen = softmax_rows(logits);
    CHECK(unflatten_distribution(flatten_distribution(gen), num_contexts, num_actions) == gen);
  }
}

TEST_CASE("single-context flatten is the row itself") {
  const auto xi = ConditionalDistribution::uniform(1, 3);
  const auto flat = flatten_distribution(xi);
  REQUIRE(flat.size() == 3);
  for (double v : flat) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("invalid distributions are rejected") {
  Matrix bad(1, 2);
  bad(0, 0) = 0.6;
  bad(0, 1) = 0.5;
  CHECK_THROWS(ConditionalDistribution(std::move(bad)));

  Matrix negative(1, 2);
  negative(0, 0) = -0.1;
  negative(0, 1) = 1.1;
  CHECK_THROWS(ConditionalDistribution(std::move(negative)));
}
