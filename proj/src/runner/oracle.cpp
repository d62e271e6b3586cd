#include "mfbo/runner/oracle.hpp"

#include <stdexcept>

namespace mfbo::runner {

namespace {

constexpr int kMaxDims = 5;

// All compositions of `resolution` into `parts` nonnegative integers,
// returned as probability rows.
std::vector<std::vector<double>> simplex_grid(int resolution, int parts) {
  std::vector<std::vector<double>> grid;
  std::vector<int> counts(parts, 0);

  auto recurse = [&](auto&& self, int index, int remaining) -> void {
    if (index == parts - 1) {
      counts[index] = remaining;
      std::vector<double> row(parts);
      for (int i = 0; i < parts; ++i) row[i] = static_cast<double>(counts[i]) / resolution;
      grid.push_back(std::move(row));
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      counts[index] = take;
      self(self, index + 1, remaining - take);
    }
  };
  recurse(recurse, 0, resolution);
  return grid;
}

}  // namespace

OracleResult brute_force_optimum(const EnvironmentSpec& spec, int resolution) {
  if (resolution < 1) throw std::invalid_argument("brute_force_optimum: resolution must be >= 1");
  const int num_actions = spec.actions.size();
  const int num_contexts = spec.contexts.size();
  if (num_actions * num_contexts > kMaxDims) {
    throw std::invalid_argument(
        "brute_force_optimum: |A|*|C| exceeds the tractability guard");
  }

  const std::vector<std::vector<double>> grid = simplex_grid(resolution, num_actions);
  std::vector<std::size_t> pick(num_contexts, 0);
  Matrix candidate(num_contexts, num_actions);
  Matrix best_rows;
  double best_value = -std::numeric_limits<double>::infinity();

  bool done = false;
  while (!done) {
    for (int c = 0; c < num_contexts; ++c) {
      const auto& row = grid[pick[c]];
      for (int a = 0; a < num_actions; ++a) candidate(c, a) = row[a];
    }
    const double value = mean_field_value(spec, candidate);
    if (value > best_value) {
      best_value = value;
      best_rows = candidate;
    }
    // odometer over the per-context grid choices
    int c = 0;
    for (; c < num_contexts; ++c) {
      if (++pick[c] < grid.size()) break;
      pick[c] = 0;
    }
    done = c == num_contexts;
  }
  return {ConditionalDistribution(std::move(best_rows)), best_value};
}

std::vector<double> regret_curve(const std::vector<RunRecord>& records, double g_star) {
  std::vector<double> regret;
  regret.reserve(records.size());
  double acc = 0.0;
  for (const RunRecord& r : records) {
    acc += g_star - r.reward;
    regret.push_back(acc);
  }
  return regret;
}

}  // namespace mfbo::runner
