#include "mfbo/runner/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "mfbo/data.hpp"
#include "mfbo/errors.hpp"
#include "mfbo/simd/simd.hpp"

namespace mfbo::runner {

namespace fs = std::filesystem;
using nlohmann::json;

const char* algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::MfGpUcb: return "mf_gp_ucb";
    case Algorithm::Random: return "random";
    case Algorithm::SimulatedAnnealing: return "simulated_annealing";
    case Algorithm::GeneticAlgorithm: return "genetic_algorithm";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "mf_gp_ucb") return Algorithm::MfGpUcb;
  if (name == "random") return Algorithm::Random;
  if (name == "simulated_annealing") return Algorithm::SimulatedAnnealing;
  if (name == "genetic_algorithm") return Algorithm::GeneticAlgorithm;
  throw ConfigError("unknown algorithm '" + name + "'");
}

ActionSet make_angle_actions(int num_actions) {
  ActionSet actions;
  actions.embeddings.reserve(num_actions);
  for (int i = 0; i < num_actions; ++i) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(i) / (num_actions - 1);
    actions.embeddings.push_back({angle});
    actions.labels.push_back("a" + std::to_string(i));
  }
  return actions;
}

namespace {

std::vector<double> context_probs_or_uniform(const json& j, int num_contexts) {
  if (j.contains("context_probs")) {
    const auto probs = j.at("context_probs").get<std::vector<double>>();
    if (static_cast<int>(probs.size()) != num_contexts) {
      throw ConfigError("context_probs length does not match the context count");
    }
    return probs;
  }
  return std::vector<double>(num_contexts, 1.0 / num_contexts);
}

// Demand-matching action embeddings either spread the kept actions along a
// unit interval or place them at their grid-cell centres (action ids carry
// the original row-major cell index).
ActionSet demand_actions(const json& je, const Distribution& dist) {
  const std::string embedding = je.value("embedding", std::string("index_1d"));
  const int n = static_cast<int>(dist.probs.size());
  ActionSet actions;
  actions.labels = dist.labels;
  if (embedding == "grid") {
    const int rows = je.at("grid_rows").get<int>();
    const int cols = je.at("grid_cols").get<int>();
    if (rows < 1 || cols < 1) throw ConfigError("grid_rows/grid_cols must be >= 1");
    for (int i = 0; i < n; ++i) {
      const int id = dist.action_id[i];
      const int r = id / cols;
      const int c = id % cols;
      if (r >= rows) throw ConfigError("action_id exceeds the configured grid");
      actions.embeddings.push_back(
          {(r + 0.5) / static_cast<double>(rows), (c + 0.5) / static_cast<double>(cols)});
    }
  } else if (embedding == "index_1d") {
    for (int i = 0; i < n; ++i) {
      actions.embeddings.push_back({n > 1 ? static_cast<double>(i) / (n - 1) : 0.0});
    }
  } else {
    throw ConfigError("unknown embedding '" + embedding + "'");
  }
  return actions;
}

EnvironmentSpec parse_environment(const json& je, const fs::path& base_dir) {
  EnvironmentSpec env;
  const std::string kind = je.at("kind").get<std::string>();
  env.population_m = je.at("population_m").get<int>();
  env.noise_std = je.value("noise_std", 0.0);
  env.deterministic_mode = je.value("deterministic_mode", false);

  auto resolve_path = [&](const std::string& p) {
    const fs::path fp(p);
    return fp.is_absolute() ? fp.string() : (base_dir / fp).string();
  };
  auto load_dist_field = [&](const char* inline_key, const char* file_key) {
    if (je.contains(inline_key)) {
      Distribution d;
      d.probs = je.at(inline_key).get<std::vector<double>>();
      for (std::size_t i = 0; i < d.probs.size(); ++i) {
        d.action_id.push_back(static_cast<int>(i));
        d.labels.push_back(std::to_string(i));
      }
      return d;
    }
    if (je.contains(file_key)) {
      return load_distribution(resolve_path(je.at(file_key).get<std::string>()));
    }
    throw ConfigError(std::string("environment needs '") + inline_key + "' or '" +
                      file_key + "'");
  };

  if (kind == "swarm") {
    env.kind = EnvKind::Swarm;
    env.actions = make_angle_actions(je.at("num_actions").get<int>());
    env.contexts = ContextMeasure::trivial();
    env.congestion_sigma = je.value("congestion_sigma", 0.0);
  } else if (kind == "arena") {
    env.kind = EnvKind::Arena;
    env.actions = make_angle_actions(je.at("num_actions").get<int>());
    env.contexts.embeddings = {{-1.0}, {1.0}};
    env.contexts.probs = context_probs_or_uniform(je, 2);
    env.congestion_sigma = je.value("congestion_sigma", 0.0);
  } else if (kind == "demand_matching") {
    env.kind = EnvKind::DemandMatching;
    const Distribution dist = load_dist_field("demand", "demand_file");
    env.demand = dist.probs;
    env.actions = demand_actions(je, dist);
    env.contexts = ContextMeasure::trivial();
  } else if (kind == "maritime") {
    env.kind = EnvKind::Maritime;
    const Distribution capacity = load_dist_field("port_capacity", "capacity_file");
    env.port_capacity = capacity.probs;
    env.port_region = je.at("port_region").get<std::vector<int>>();
    const int num_regions = je.at("num_regions").get<int>();
    if (num_regions < 2) throw ConfigError("maritime needs num_regions >= 2");
    const int n = static_cast<int>(capacity.probs.size());
    env.actions.labels = capacity.labels;
    for (int i = 0; i < n; ++i) {
      if (i >= static_cast<int>(env.port_region.size())) break;
      env.actions.embeddings.push_back(
          {n > 1 ? static_cast<double>(i) / (n - 1) : 0.0,
           static_cast<double>(env.port_region[i]) / (num_regions - 1)});
    }
    for (int r = 0; r < num_regions; ++r) {
      env.contexts.embeddings.push_back({static_cast<double>(r) / (num_regions - 1)});
    }
    env.contexts.probs = context_probs_or_uniform(je, num_regions);
  } else {
    throw ConfigError("unknown environment kind '" + kind + "'");
  }

  env.validate();
  return env;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }

  try {
    ExperimentConfig cfg;
    const fs::path base_dir = fs::path(path).parent_path();
    cfg.environment = parse_environment(j.at("environment"), base_dir);

    if (j.contains("algorithms")) {
      for (const auto& name : j.at("algorithms")) {
        cfg.algorithms.push_back(algorithm_from_name(name.get<std::string>()));
      }
    } else if (j.contains("algorithm")) {
      cfg.algorithms.push_back(algorithm_from_name(j.at("algorithm").get<std::string>()));
    } else {
      cfg.algorithms = {Algorithm::MfGpUcb};
    }
    if (cfg.algorithms.empty()) throw ConfigError("algorithms list is empty");

    read_if(j, "budget_t", cfg.budget_t);
    if (cfg.budget_t < 1) throw ConfigError("budget_t must be >= 1");

    if (j.contains("seeds")) {
      cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      for (std::uint64_t s = 0; s < 10; ++s) cfg.seeds.push_back(s);
    }
    if (cfg.seeds.empty()) throw ConfigError("seeds list is empty");

    if (j.contains("kernel")) {
      const json& jk = j.at("kernel");
      read_if(jk, "lengthscale_action", cfg.kernel.lengthscale_action);
      read_if(jk, "lengthscale_context", cfg.kernel.lengthscale_context);
      read_if(jk, "lengthscale_dist", cfg.kernel.lengthscale_dist);
      read_if(jk, "output_scale", cfg.kernel.output_scale);
      read_if(jk, "standardize_targets", cfg.kernel.standardize_targets);
      if (jk.contains("rbf_form")) {
        const std::string form = jk.at("rbf_form").get<std::string>();
        if (form == "squared_exponential") {
          cfg.kernel.rbf_form = RbfForm::SquaredExponential;
        } else if (form == "paper_literal") {
          cfg.kernel.rbf_form = RbfForm::PaperLiteral;
        } else {
          throw ConfigError("unknown rbf_form '" + form + "'");
        }
      }
    }
    read_if(j, "gp_noise_std", cfg.gp_noise_std);

    if (j.contains("beta")) {
      const json& jb = j.at("beta");
      if (jb.contains("mode")) {
        const std::string mode = jb.at("mode").get<std::string>();
        if (mode == "theoretical") cfg.beta.mode = BetaMode::Theoretical;
        else if (mode == "constant") cfg.beta.mode = BetaMode::Constant;
        else if (mode == "log_growth") cfg.beta.mode = BetaMode::LogGrowth;
        else throw ConfigError("unknown beta mode '" + mode + "'");
      }
      read_if(jb, "a_const", cfg.beta.a_const);
      read_if(jb, "b_const", cfg.beta.b_const);
      read_if(jb, "constant_value", cfg.beta.constant_value);
      read_if(jb, "log_scale", cfg.beta.log_scale);
    }

    if (j.contains("acq")) {
      const json& ja = j.at("acq");
      read_if(ja, "steps", cfg.acq.steps);
      read_if(ja, "learning_rate", cfg.acq.learning_rate);
      read_if(ja, "restarts", cfg.acq.restarts);
      read_if(ja, "adam_beta1", cfg.acq.adam_beta1);
      read_if(ja, "adam_beta2", cfg.acq.adam_beta2);
      read_if(ja, "adam_eps", cfg.acq.adam_eps);
      if (ja.contains("grad_mode")) {
        const std::string mode = ja.at("grad_mode").get<std::string>();
        if (mode == "analytic") cfg.acq.grad_mode = GradMode::Analytic;
        else if (mode == "finite_difference") cfg.acq.grad_mode = GradMode::FiniteDifference;
        else throw ConfigError("unknown grad_mode '" + mode + "'");
      }
      cfg.acq.validate();
    }

    if (j.contains("sa")) {
      const json& js = j.at("sa");
      read_if(js, "init_temp", cfg.sa.init_temp);
      read_if(js, "cooling", cfg.sa.cooling);
      read_if(js, "moves_per_iter", cfg.sa.moves_per_iter);
      cfg.sa.validate();
    }
    if (j.contains("ga")) {
      const json& jg = j.at("ga");
      read_if(jg, "pop_size", cfg.ga.pop_size);
      read_if(jg, "tournament_k", cfg.ga.tournament_k);
      read_if(jg, "crossover_rate", cfg.ga.crossover_rate);
      read_if(jg, "mutation_rate", cfg.ga.mutation_rate);
      read_if(jg, "elitism", cfg.ga.elitism);
      cfg.ga.validate();
    }

    read_if(j, "oracle_resolution", cfg.oracle_resolution);
    read_if(j, "output_dir", cfg.output_dir);
    cfg.beta.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config field error in " + path + ": " + e.what());
  }
}

namespace {

double embedding_diameter(const std::vector<std::vector<double>>& embeddings) {
  double best = 0.0;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    for (std::size_t j = i + 1; j < embeddings.size(); ++j) {
      best = std::max(best, simd::squared_distance(embeddings[i].data(),
                                                   embeddings[j].data(),
                                                   embeddings[i].size()));
    }
  }
  return std::sqrt(best);
}

double auto_lengthscale(double configured, double diameter) {
  if (configured > 0.0) return configured;
  const double ls = 0.2 * diameter;
  return ls > 0.0 ? ls : 1.0;
}

}  // namespace

KernelParams resolve_kernel(const KernelConfig& cfg, const EnvironmentSpec& env) {
  KernelParams params;
  params.lengthscale_action =
      auto_lengthscale(cfg.lengthscale_action, embedding_diameter(env.actions.embeddings));
  params.lengthscale_context =
      auto_lengthscale(cfg.lengthscale_context, embedding_diameter(env.contexts.embeddings));
  params.lengthscale_dist =
      auto_lengthscale(cfg.lengthscale_dist, std::numbers::sqrt2);
  params.output_scale = cfg.output_scale;
  params.rbf_form = cfg.rbf_form;
  params.validate();
  return params;
}

double resolve_gp_noise(const ExperimentConfig& cfg) {
  if (cfg.gp_noise_std >= 0.0) return cfg.gp_noise_std;
  return std::max(cfg.environment.noise_std, 1e-3);
}

}  // namespace mfbo::runner
