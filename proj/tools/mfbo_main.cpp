#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfbo/data.hpp"
#include "mfbo/errors.hpp"
#include "mfbo/runner/config.hpp"
#include "mfbo/runner/experiment.hpp"
#include "mfbo/runner/oracle.hpp"
#include "mfbo/simd/simd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int cmd_run(const std::string& config_path) {
  const auto cfg = mfbo::runner::load_experiment_config(config_path);
  std::printf("mfbo run: %zu algorithm(s) x %zu seed(s), T=%d, simd=%s\n",
              cfg.algorithms.size(), cfg.seeds.size(), cfg.budget_t,
              mfbo::simd::isa_name(mfbo::simd::active_isa()));
  mfbo::runner::run_experiment(cfg);
  std::printf("mfbo run: results in %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_aggregate(const std::string& dir) {
  mfbo::runner::aggregate_directory(dir);
  std::printf("mfbo aggregate: wrote agg_*.csv in %s\n", dir.c_str());
  return 0;
}

int cmd_plot(const std::string& dir) {
  mfbo::runner::plot_directory(dir);
  std::printf("mfbo plot: wrote convergence.svg in %s\n", dir.c_str());
  return 0;
}

int cmd_oracle(const std::string& config_path, int resolution) {
  const auto cfg = mfbo::runner::load_experiment_config(config_path);
  const int res = resolution > 0 ? resolution : cfg.oracle_resolution;
  const auto oracle = mfbo::runner::brute_force_optimum(cfg.environment, res);
  std::printf("g_star = %.12g (resolution %d)\n", oracle.g_star, res);
  for (int c = 0; c < oracle.xi_star.num_contexts(); ++c) {
    std::printf("xi_star context %d:", c);
    for (int a = 0; a < oracle.xi_star.num_actions(); ++a) {
      std::printf(" %.6g", oracle.xi_star(c, a));
    }
    std::printf("\n");
  }
  return 0;
}

int cmd_demand(const std::string& trips_path, const std::string& config_path) {
  std::ifstream cfg_in(config_path);
  if (!cfg_in) throw mfbo::IoError("cannot open config file " + config_path);
  json j;
  try {
    cfg_in >> j;
  } catch (const json::exception& e) {
    throw mfbo::ConfigError("config parse failure in " + config_path + ": " + e.what());
  }

  mfbo::ColumnMapping mapping;
  try {
    const json& jc = j.at("columns");
    mapping.timestamp = jc.value("timestamp", std::string());
    mapping.lat = jc.value("lat", std::string());
    mapping.lon = jc.value("lon", std::string());
    mapping.station = jc.value("station", std::string());

    mfbo::DemandEstimateConfig est_cfg;
    est_cfg.weekday = j.value("weekday", 6);
    est_cfg.hour_start = j.value("hour_start", 0);
    est_cfg.hour_end = j.value("hour_end", 24);
    est_cfg.num_weeks = j.value("num_weeks", 20);

    mfbo::Discretiser discretiser;
    const std::string kind = j.value("discretiser", std::string("stations"));
    if (kind == "grid") {
      const json& jg = j.at("grid");
      mfbo::GridSpec grid;
      grid.lat_min = jg.at("lat_min").get<double>();
      grid.lat_max = jg.at("lat_max").get<double>();
      grid.lon_min = jg.at("lon_min").get<double>();
      grid.lon_max = jg.at("lon_max").get<double>();
      grid.rows = jg.at("rows").get<int>();
      grid.cols = jg.at("cols").get<int>();
      grid.validate();
      discretiser = grid;
    } else if (kind == "stations") {
      mfbo::StationMap stations;
      if (j.contains("stations")) {
        stations.labels = j.at("stations").get<std::vector<std::string>>();
      }
      discretiser = stations;
    } else {
      throw mfbo::ConfigError("unknown discretiser '" + kind + "'");
    }

    const std::string output = j.at("output").get<std::string>();

    std::ifstream trips_in(trips_path, std::ios::binary);
    if (!trips_in) throw mfbo::IoError("cannot open trips file " + trips_path);
    const mfbo::ParsedTrips trips = mfbo::parse_trips(trips_in, mapping);
    std::printf("parsed %zu trips (%zu rows skipped)\n", trips.records.size(),
                trips.skipped);

    const mfbo::DemandEstimate est =
        mfbo::estimate_demand(trips.records, est_cfg, discretiser);
    if (est.fewer_weeks_than_requested) {
      std::fprintf(stderr,
                   "warning: only %d matching week(s) available, %d requested\n",
                   est.weeks_used, est_cfg.num_weeks);
    }

    mfbo::Distribution dist;
    dist.action_id = est.kept_actions;
    dist.labels = est.kept_labels;
    dist.probs = est.demand;
    mfbo::save_distribution(output, dist);
    std::printf("demand over %zu action(s) from %d week(s) -> %s\n",
                est.demand.size(), est.weeks_used, output.c_str());
    return 0;
  } catch (const json::exception& e) {
    throw mfbo::ConfigError("config field error in " + config_path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field Bayesian optimisation experiments"};
  app.require_subcommand(1);

  std::string config_path, dir, trips_path;
  int resolution = 0;

  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("config", config_path, "experiment JSON")->required();

  CLI::App* aggregate = app.add_subcommand("aggregate", "rebuild aggregate CSVs");
  aggregate->add_option("dir", dir, "experiment output directory")->required();

  CLI::App* plot = app.add_subcommand("plot", "rebuild SVG plots");
  plot->add_option("dir", dir, "experiment output directory")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force simplex-grid optimum");
  oracle->add_option("config", config_path, "experiment JSON")->required();
  oracle->add_option("--resolution", resolution, "grid subdivisions per coordinate");

  CLI::App* demand = app.add_subcommand("demand", "estimate demand from trip CSV");
  demand->add_option("trips", trips_path, "trip CSV file")->required();
  demand->add_option("config", config_path, "ingestion JSON")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path);
    if (aggregate->parsed()) return cmd_aggregate(dir);
    if (plot->parsed()) return cmd_plot(dir);
    if (oracle->parsed()) return cmd_oracle(config_path, resolution);
    if (demand->parsed()) return cmd_demand(trips_path, config_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mfbo::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const mfbo::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
