#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfbo/linalg.hpp"
#include "mfbo/rng.hpp"

namespace mfbo {

// Discrete action set. Each action is a point in R^{d_A}; labels are kept
// for data-driven actions (station ids, port names).
struct ActionSet {
  std::vector<std::vector<double>> embeddings;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(embeddings.size()); }
  int dim() const { return embeddings.empty() ? 0 : static_cast<int>(embeddings.front().size()); }
  void validate() const;
};

// Finite context measure p(c).
struct ContextMeasure {
  std::vector<std::vector<double>> embeddings;
  std::vector<double> probs;

  int size() const { return static_cast<int>(embeddings.size()); }
  int dim() const { return embeddings.empty() ? 0 : static_cast<int>(embeddings.front().size()); }
  void validate() const;

  // Single context at the origin with probability one.
  static ContextMeasure trivial();
};

// Per-context probability rows over actions: rows()(c, a) = xi(a | c).
// Validated on construction: entries in [0,1], each row sums to 1 within 1e-9.
class ConditionalDistribution {
public:
  explicit ConditionalDistribution(Matrix rows);

  static ConditionalDistribution uniform(int num_contexts, int num_actions);

  int num_contexts() const { return static_cast<int>(rows_.rows()); }
  int num_actions() const { return static_cast<int>(rows_.cols()); }
  double operator()(int c, int a) const { return rows_(c, a); }
  std::span<const double> row(int c) const { return rows_.row_span(c); }
  const Matrix& rows() const { return rows_; }

  bool operator==(const ConditionalDistribution&) const = default;

private:
  Matrix rows_;
};

// Unconstrained |C| x |A| parametrisation mapped to the simplex by
// softmax_rows.
struct Logits {
  Matrix theta;
};

struct PopulationAssignment {
  std::vector<std::int32_t> context_idx;
  std::vector<std::int32_t> action_idx;

  int size() const { return static_cast<int>(action_idx.size()); }
};

enum class EmpiricalScope { Global, PerContext };

// Row-wise stabilised softmax. Output rows renormalised so the simplex
// invariants hold to machine precision.
ConditionalDistribution softmax_rows(const Logits& logits);

// Contexts drawn i.i.d. from p, then each agent's action from xi(.|context).
PopulationAssignment sample_population(const ConditionalDistribution& xi,
                                       const ContextMeasure& p, int population,
                                       Rng& rng);

// Global: 1 x |A| frequency row. PerContext: |C| x |A| where a context with
// no agents keeps an all-zero row.
Matrix empirical_distribution(const PopulationAssignment& pop, int num_actions,
                              EmpiricalScope scope, int num_contexts = 1);

// Context-major row concatenation, length |A|*|C|.
std::vector<double> flatten_distribution(const ConditionalDistribution& xi);

ConditionalDistribution unflatten_distribution(std::span<const double> flat,
                                               int num_contexts, int num_actions);

// sum_c p(c) xi(.|c), length |A|.
std::vector<double> marginal_action_distribution(const ConditionalDistribution& xi,
                                                 const ContextMeasure& p);

}  // namespace mfbo
