#include "mfbo/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfbo/errors.hpp"
#include "mfbo/simd/simd.hpp"

namespace mfbo {

namespace {
constexpr double kRowSumTol = 1e-9;
constexpr double kMeasureSumTol = 1e-12;
}  // namespace

void ActionSet::validate() const {
  if (size() < 2) throw std::invalid_argument("ActionSet needs at least 2 actions");
  const std::size_t d = embeddings.front().size();
  for (const auto& e : embeddings) {
    if (e.size() != d) throw DimensionError("ActionSet embeddings have mixed lengths");
  }
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) {
      if (embeddings[i] == embeddings[j]) {
        throw std::invalid_argument("ActionSet embeddings must be pairwise distinct");
      }
    }
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != size()) {
    throw DimensionError("ActionSet labels length does not match embeddings");
  }
}

void ContextMeasure::validate() const {
  if (size() < 1) throw std::invalid_argument("ContextMeasure needs at least 1 context");
  if (static_cast<int>(probs.size()) != size()) {
    throw DimensionError("ContextMeasure probs length does not match embeddings");
  }
  const std::size_t d = embeddings.front().size();
  for (const auto& e : embeddings) {
    if (e.size() != d) throw DimensionError("ContextMeasure embeddings have mixed lengths");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("ContextMeasure probs must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > kMeasureSumTol) {
    throw std::invalid_argument("ContextMeasure probs must sum to 1");
  }
}

ContextMeasure ContextMeasure::trivial() {
  ContextMeasure p;
  p.embeddings = {{0.0}};
  p.probs = {1.0};
  return p;
}

ConditionalDistribution::ConditionalDistribution(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || rows_.cols() == 0) {
    throw DimensionError("ConditionalDistribution must be nonempty");
  }
  for (std::size_t c = 0; c < rows_.rows(); ++c) {
    double total = 0.0;
    for (std::size_t a = 0; a < rows_.cols(); ++a) {
      const double v = rows_(c, a);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("ConditionalDistribution entries must lie in [0,1]");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kRowSumTol) {
      throw std::invalid_argument("ConditionalDistribution row does not sum to 1");
    }
  }
}

ConditionalDistribution ConditionalDistribution::uniform(int num_contexts, int num_actions) {
  Matrix m(num_contexts, num_actions, 1.0 / num_actions);
  return ConditionalDistribution(std::move(m));
}

ConditionalDistribution softmax_rows(const Logits& logits) {
  const Matrix& theta = logits.theta;
  Matrix out(theta.rows(), theta.cols());
  for (std::size_t c = 0; c < theta.rows(); ++c) {
    double mx = theta(c, 0);
    for (std::size_t a = 1; a < theta.cols(); ++a) mx = std::max(mx, theta(c, a));
    if (!std::isfinite(mx)) throw std::invalid_argument("softmax_rows: non-finite logit");
    double total = 0.0;
    for (std::size_t a = 0; a < theta.cols(); ++a) {
      const double e = std::exp(theta(c, a) - mx);
      out(c, a) = e;
      total += e;
    }
    for (std::size_t a = 0; a < theta.cols(); ++a) out(c, a) /= total;
  }
  return ConditionalDistribution(std::move(out));
}

PopulationAssignment sample_population(const ConditionalDistribution& xi,
                                       const ContextMeasure& p, int population,
                                       Rng& rng) {
  if (population < 1) throw std::invalid_argument("population must be >= 1");
  if (xi.num_contexts() != p.size()) {
    throw DimensionError("sample_population: xi contexts do not match measure");
  }
  PopulationAssignment pop;
  pop.context_idx.resize(population);
  pop.action_idx.resize(population);
  for (int m = 0; m < population; ++m) {
    pop.context_idx[m] = static_cast<std::int32_t>(rng.categorical(p.probs));
  }
  for (int m = 0; m < population; ++m) {
    pop.action_idx[m] = static_cast<std::int32_t>(rng.categorical(xi.row(pop.context_idx[m])));
  }
  return pop;
}

Matrix empirical_distribution(const PopulationAssignment& pop, int num_actions,
                              EmpiricalScope scope, int num_contexts) {
  if (pop.size() == 0) throw std::invalid_argument("empirical_distribution: empty population");
  if (scope == EmpiricalScope::Global) {
    Matrix freq(1, num_actions);
    for (int m = 0; m < pop.size(); ++m) freq(0, pop.action_idx[m]) += 1.0;
    for (int a = 0; a < num_actions; ++a) freq(0, a) /= pop.size();
    return freq;
  }
  Matrix freq(num_contexts, num_actions);
  std::vector<double> counts(num_contexts, 0.0);
  for (int m = 0; m < pop.size(); ++m) {
    freq(pop.context_idx[m], pop.action_idx[m]) += 1.0;
    counts[pop.context_idx[m]] += 1.0;
  }
  for (int c = 0; c < num_contexts; ++c) {
    if (counts[c] == 0.0) continue;
    for (int a = 0; a < num_actions; ++a) freq(c, a) /= counts[c];
  }
  return freq;
}

std::vector<double> flatten_distribution(const ConditionalDistribution& xi) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(xi.num_contexts()) * xi.num_actions());
  for (int c = 0; c < xi.num_contexts(); ++c) {
    const auto row = xi.row(c);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

ConditionalDistribution unflatten_distribution(std::span<const double> flat,
                                               int num_contexts, int num_actions) {
  if (static_cast<int>(flat.size()) != num_contexts * num_actions) {
    throw DimensionError("unflatten_distribution: length mismatch");
  }
  Matrix rows(num_contexts, num_actions);
  for (int c = 0; c < num_contexts; ++c) {
    for (int a = 0; a < num_actions; ++a) rows(c, a) = flat[c * num_actions + a];
  }
  return ConditionalDistribution(std::move(rows));
}

std::vector<double> marginal_action_distribution(const ConditionalDistribution& xi,
                                                 const ContextMeasure& p) {
  if (xi.num_contexts() != p.size()) {
    throw DimensionError("marginal_action_distribution: context mismatch");
  }
  std::vector<double> marginal(xi.num_actions(), 0.0);
  for (int c = 0; c < xi.num_contexts(); ++c) {
    simd::axpy(p.probs[c], xi.row(c).data(), marginal.data(), marginal.size());
  }
  return marginal;
}

}  // namespace mfbo
