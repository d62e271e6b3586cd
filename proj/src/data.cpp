#include "mfbo/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mfbo/errors.hpp"

namespace mfbo {

namespace {

// Minimal CSV field splitter: handles double-quoted fields with "" escapes,
// which is as far as the trip datasets go.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_timestamp(const std::string& text, TripRecord& rec) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const int got = std::sscanf(text.c_str(), "%d-%d-%d%*1[T ]%d:%d:%d", &y, &mo, &d, &h, &mi, &s);
  if (got < 5) return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) {
    return false;
  }
  rec.epoch_days = days_from_civil(y, mo, d);
  rec.hour = h;
  rec.minute = mi;
  rec.weekday = static_cast<int>(((rec.epoch_days % 7) + 11) % 7);  // 1970-01-01 = Thursday
  return true;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

ParsedTrips parse_trips(std::istream& csv, const ColumnMapping& mapping) {
  std::string line;
  if (!std::getline(csv, line)) throw IoError("parse_trips: empty input");
  const std::vector<std::string> header = split_csv_line(line);

  if (mapping.timestamp.empty()) throw ConfigError("parse_trips: no timestamp column mapped");
  const int ts_col = find_column(header, mapping.timestamp);
  if (ts_col < 0) throw ConfigError("parse_trips: missing column '" + mapping.timestamp + "'");

  const bool latlon_mode = !mapping.lat.empty() && !mapping.lon.empty();
  int lat_col = -1, lon_col = -1, station_col = -1;
  if (latlon_mode) {
    lat_col = find_column(header, mapping.lat);
    lon_col = find_column(header, mapping.lon);
    if (lat_col < 0) throw ConfigError("parse_trips: missing column '" + mapping.lat + "'");
    if (lon_col < 0) throw ConfigError("parse_trips: missing column '" + mapping.lon + "'");
  } else if (!mapping.station.empty()) {
    station_col = find_column(header, mapping.station);
    if (station_col < 0) {
      throw ConfigError("parse_trips: missing column '" + mapping.station + "'");
    }
  } else {
    throw ConfigError("parse_trips: map either a station column or lat+lon columns");
  }

  ParsedTrips out;
  const int max_col = std::max({ts_col, lat_col, lon_col, station_col});
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) <= max_col) {
      ++out.skipped;
      continue;
    }
    TripRecord rec;
    if (!parse_timestamp(fields[ts_col], rec)) {
      ++out.skipped;
      continue;
    }
    if (latlon_mode) {
      if (!parse_double(fields[lat_col], rec.lat) || !parse_double(fields[lon_col], rec.lon)) {
        ++out.skipped;
        continue;
      }
      rec.has_latlon = true;
    } else {
      rec.station = fields[station_col];
      if (rec.station.empty()) {
        ++out.skipped;
        continue;
      }
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) throw IoError("parse_trips: no valid rows");
  return out;
}

void GridSpec::validate() const {
  if (!(lat_max > lat_min) || !(lon_max > lon_min)) {
    throw std::invalid_argument("GridSpec: max must exceed min on both axes");
  }
  if (rows < 1 || cols < 1) throw std::invalid_argument("GridSpec: rows and cols must be >= 1");
}

std::optional<int> grid_cell(double lat, double lon, const GridSpec& grid) {
  if (std::isnan(lat) || std::isnan(lon)) return std::nullopt;
  if (lat < grid.lat_min || lat > grid.lat_max || lon < grid.lon_min || lon > grid.lon_max) {
    return std::nullopt;
  }
  int r = static_cast<int>((lat - grid.lat_min) / (grid.lat_max - grid.lat_min) * grid.rows);
  int c = static_cast<int>((lon - grid.lon_min) / (grid.lon_max - grid.lon_min) * grid.cols);
  r = std::min(r, grid.rows - 1);
  c = std::min(c, grid.cols - 1);
  return r * grid.cols + c;
}

void DemandEstimateConfig::validate() const {
  if (weekday < 0 || weekday > 6) throw std::invalid_argument("DemandEstimateConfig: weekday must be 0..6");
  if (hour_start < 0 || hour_end > 24 || hour_start >= hour_end) {
    throw std::invalid_argument("DemandEstimateConfig: need 0 <= hour_start < hour_end <= 24");
  }
  if (num_weeks < 1) throw std::invalid_argument("DemandEstimateConfig: num_weeks must be >= 1");
}

DemandEstimate estimate_demand(const std::vector<TripRecord>& trips,
                               const DemandEstimateConfig& cfg,
                               const Discretiser& discretiser) {
  cfg.validate();

  std::vector<const TripRecord*> filtered;
  for (const TripRecord& t : trips) {
    if (t.weekday == cfg.weekday && t.hour >= cfg.hour_start && t.hour < cfg.hour_end) {
      filtered.push_back(&t);
    }
  }
  if (filtered.empty()) {
    throw IoError("estimate_demand: no trips match the weekday/hour filter");
  }

  int num_cells = 0;
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> station_index;
  const GridSpec* grid = std::get_if<GridSpec>(&discretiser);
  if (grid != nullptr) {
    grid->validate();
    num_cells = grid->num_cells();
    labels.resize(num_cells);
    for (int r = 0; r < grid->rows; ++r) {
      for (int c = 0; c < grid->cols; ++c) {
        labels[r * grid->cols + c] = "r" + std::to_string(r) + "c" + std::to_string(c);
      }
    }
  } else {
    labels = std::get<StationMap>(discretiser).labels;
    if (labels.empty()) {
      std::set<std::string> unique;
      for (const TripRecord* t : filtered) {
        if (!t->station.empty()) unique.insert(t->station);
      }
      labels.assign(unique.begin(), unique.end());
    }
    num_cells = static_cast<int>(labels.size());
    for (int i = 0; i < num_cells; ++i) station_index[labels[i]] = i;
  }
  if (num_cells == 0) throw IoError("estimate_demand: empty discretiser");

  // Per-calendar-date histograms over the full cell space.
  std::map<std::int64_t, std::vector<double>> by_date;
  for (const TripRecord* t : filtered) {
    int cell = -1;
    if (grid != nullptr) {
      if (!t->has_latlon) continue;
      const auto idx = grid_cell(t->lat, t->lon, *grid);
      if (!idx.has_value()) continue;
      cell = *idx;
    } else {
      const auto it = station_index.find(t->station);
      if (it == station_index.end()) continue;
      cell = it->second;
    }
    auto& hist = by_date[t->epoch_days];
    if (hist.empty()) hist.assign(num_cells, 0.0);
    hist[cell] += 1.0;
  }
  if (by_date.empty()) {
    throw IoError("estimate_demand: no trips landed in the discretiser");
  }

  // Most recent dates first, per-week normalisation before averaging.
  std::vector<const std::vector<double>*> weeks;
  for (auto it = by_date.rbegin(); it != by_date.rend() &&
                                   static_cast<int>(weeks.size()) < cfg.num_weeks;
       ++it) {
    weeks.push_back(&it->second);
  }

  std::vector<double> mean(num_cells, 0.0);
  for (const auto* hist : weeks) {
    double total = 0.0;
    for (double v : *hist) total += v;
    for (int i = 0; i < num_cells; ++i) mean[i] += (*hist)[i] / total;
  }
  for (double& v : mean) v /= static_cast<double>(weeks.size());

  DemandEstimate est;
  est.weeks_used = static_cast<int>(weeks.size());
  est.fewer_weeks_than_requested = est.weeks_used < cfg.num_weeks;
  double kept_mass = 0.0;
  for (int i = 0; i < num_cells; ++i) {
    if (mean[i] > 0.0) {
      est.kept_actions.push_back(i);
      est.kept_labels.push_back(labels[i]);
      est.demand.push_back(mean[i]);
      kept_mass += mean[i];
    }
  }
  for (double& v : est.demand) v /= kept_mass;
  return est;
}

void save_distribution(const std::string& path, const Distribution& dist) {
  if (dist.action_id.size() != dist.probs.size() ||
      (!dist.labels.empty() && dist.labels.size() != dist.probs.size())) {
    throw DimensionError("save_distribution: column lengths differ");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_distribution: cannot open " + path);
  out << "action_id,label,prob\n";
  char buf[64];
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", dist.probs[i]);
    std::string label = dist.labels.empty() ? std::string() : dist.labels[i];
    if (label.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : label) {
        if (ch == '"') quoted += "\"\"";
        else quoted.push_back(ch);
      }
      quoted += "\"";
      label = std::move(quoted);
    }
    out << dist.action_id[i] << ',' << label << ',' << buf << '\n';
  }
  if (!out) throw IoError("save_distribution: write failed for " + path);
}

Distribution load_distribution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_distribution: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("load_distribution: empty file " + path);
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "action_id" || header[1] != "label" ||
      header[2] != "prob") {
    throw IoError("load_distribution: expected header action_id,label,prob in " + path);
  }

  Distribution dist;
  std::set<int> seen;
  double total = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 3) throw IoError("load_distribution: short row in " + path);
    const int id = std::atoi(fields[0].c_str());
    if (!seen.insert(id).second) {
      throw IoError("load_distribution: duplicate action_id " + std::to_string(id));
    }
    double prob = 0.0;
    if (!parse_double(fields[2], prob) || prob < 0.0) {
      throw IoError("load_distribution: bad probability in " + path);
    }
    dist.action_id.push_back(id);
    dist.labels.push_back(fields[1].empty() ? std::to_string(id) : fields[1]);
    dist.probs.push_back(prob);
    total += prob;
  }
  if (dist.probs.empty()) throw IoError("load_distribution: no rows in " + path);
  if (std::abs(total - 1.0) > 1e-9) {
    throw IoError("load_distribution: probabilities sum to " + std::to_string(total) +
                  ", expected 1 (" + path + ")");
  }
  return dist;
}

}  // namespace mfbo
