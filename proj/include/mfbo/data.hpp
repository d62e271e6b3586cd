#pragma once

#include <istream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mfbo {

// One trip row: a timestamp plus either a station label or a lat/lon pair.
struct TripRecord {
  // Days since 1970-01-01 of the local calendar date, plus time of day.
  std::int64_t epoch_days = 0;
  int hour = 0;
  int minute = 0;
  // 0 = Sunday ... 6 = Saturday.
  int weekday = 0;
  bool has_latlon = false;
  double lat = 0.0;
  double lon = 0.0;
  std::string station;
};

struct ColumnMapping {
  std::string timestamp;
  std::string lat;      // empty unless lat/lon mode
  std::string lon;
  std::string station;  // empty unless station mode
};

struct ParsedTrips {
  std::vector<TripRecord> records;
  std::size_t skipped = 0;
};

// Streaming CSV parse. Malformed rows (bad timestamp, bad coordinates,
// missing fields) are skipped and counted; a missing mapped column or zero
// valid rows is an error.
ParsedTrips parse_trips(std::istream& csv, const ColumnMapping& mapping);

struct GridSpec {
  double lat_min = 0.0, lat_max = 0.0;
  double lon_min = 0.0, lon_max = 0.0;
  int rows = 1;
  int cols = 1;

  void validate() const;
  int num_cells() const { return rows * cols; }
};

// Row-major cell index for points inside the bounding box; nullopt outside.
// Points on the max edges fold into the last row/column.
std::optional<int> grid_cell(double lat, double lon, const GridSpec& grid);

struct DemandEstimateConfig {
  int weekday = 6;       // 0 = Sunday ... 6 = Saturday
  int hour_start = 0;    // end exclusive; 0..24 covers the whole day
  int hour_end = 24;
  int num_weeks = 20;

  void validate() const;
};

// Station-label discretiser. An empty label list is filled from the data
// (sorted unique labels of the filtered trips).
struct StationMap {
  std::vector<std::string> labels;
};

using Discretiser = std::variant<GridSpec, StationMap>;

struct DemandEstimate {
  // Mean of the per-week normalised histograms, renormalised after dropping
  // all-zero cells. Sums to 1.
  std::vector<double> demand;
  // Surviving indices into the full cell/station space.
  std::vector<int> kept_actions;
  std::vector<std::string> kept_labels;
  int weeks_used = 0;
  bool fewer_weeks_than_requested = false;
};

DemandEstimate estimate_demand(const std::vector<TripRecord>& trips,
                               const DemandEstimateConfig& cfg,
                               const Discretiser& discretiser);

// Distribution file: CSV `action_id,label,prob`, UTF-8, LF endings,
// probabilities as decimal literals round-tripping at 17 significant digits.
struct Distribution {
  std::vector<int> action_id;
  std::vector<std::string> labels;
  std::vector<double> probs;
};

void save_distribution(const std::string& path, const Distribution& dist);
Distribution load_distribution(const std::string& path);

}  // namespace mfbo
