#!/usr/bin/env python3
"""Regenerates the synthetic data fixtures under configs/data/.

The real trip datasets are not vendored; these files stand in for them with
deterministic synthetic demand surfaces of matching shape.
"""
import math
import os

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs", "data")


def write_distribution(name, rows):
    path = os.path.join(HERE, name)
    total = sum(p for _, _, p in rows)
    with open(path, "w", newline="\n") as f:
        f.write("action_id,label,prob\n")
        for action_id, label, prob in rows:
            f.write(f"{action_id},{label},{prob / total:.17g}\n")
    print(f"wrote {path} ({len(rows)} actions)")


def station_demand(num_stations, seed_phase):
    rows = []
    for i in range(num_stations):
        weight = 1.0 / (1.0 + i) + 0.35 * (1.0 + math.sin(0.9 * i + seed_phase))
        rows.append((i, f"station_{i}", weight))
    return rows


def grid_demand(rows_n, cols_n, keep_target):
    # two smooth bumps over the grid, low-mass cells dropped like the
    # zero-demand removal step in the ingestion pipeline
    cells = []
    for r in range(rows_n):
        for c in range(cols_n):
            y = r / (rows_n - 1)
            x = c / (cols_n - 1)
            bump1 = math.exp(-((y - 0.32) ** 2 + (x - 0.40) ** 2) / 0.045)
            bump2 = 0.7 * math.exp(-((y - 0.72) ** 2 + (x - 0.63) ** 2) / 0.030)
            ridge = 0.08 * math.exp(-((x - 0.5) ** 2) / 0.18)
            cells.append((r * cols_n + c, f"r{r}c{c}", bump1 + bump2 + ridge))
    cells.sort(key=lambda t: -t[2])
    kept = sorted(cells[:keep_target], key=lambda t: t[0])
    return kept


def maritime_capacity(num_ports):
    rows = []
    for i in range(num_ports):
        weight = 0.5 + (i * 7919 % 13) / 6.0
        rows.append((i, f"port_{i}", weight))
    return rows


def trips_demo(path, weeks=6):
    # Saturday pickups over a small lat/lon box; density mirrors grid_demand
    import itertools

    lat0, lat1 = 40.70, 40.78
    lon0, lon1 = -74.02, -73.94
    start_days = 19728  # 2024-01-06, a Saturday (days since 1970-01-01)

    def civil_from_days(z):
        z += 719468
        era = (z if z >= 0 else z - 146096) // 146097
        doe = z - era * 146097
        yoe = (doe - doe // 1460 + doe // 36524 - doe // 146096) // 365
        y = yoe + era * 400
        doy = doe - (365 * yoe + yoe // 4 - yoe // 100)
        mp = (5 * doy + 2) // 153
        d = doy - (153 * mp + 2) // 5 + 1
        m = mp + 3 if mp < 10 else mp - 9
        return (y + (1 if m <= 2 else 0), m, d)

    counter = 0
    with open(path, "w", newline="\n") as f:
        f.write("ride_id,started_at,start_lat,start_lng\n")
        for week, k in itertools.product(range(weeks), range(60)):
            y, m, d = civil_from_days(start_days + 7 * week)
            hour = 7 + (k * 5) % 12
            minute = (k * 13) % 60
            u = ((k * 29 + week * 11) % 60) / 59.0
            v = ((k * 17 + week * 5) % 60) / 59.0
            lat = lat0 + (lat1 - lat0) * (0.5 + 0.45 * math.sin(3.1 * u) * 0.8)
            lon = lon0 + (lon1 - lon0) * v
            counter += 1
            f.write(f"{counter},{y:04d}-{m:02d}-{d:02d} {hour:02d}:{minute:02d}:00,"
                    f"{lat:.6f},{lon:.6f}\n")
    print(f"wrote {path} ({counter} trips)")


def main():
    os.makedirs(HERE, exist_ok=True)
    write_distribution("louvelo_synth.csv", station_demand(36, 0.4))
    write_distribution("nyc12x20_synth.csv", grid_demand(12, 20, 160))
    write_distribution("nyc15x26_synth.csv", grid_demand(15, 26, 235))
    write_distribution("nyc20x36_synth.csv", grid_demand(20, 36, 394))
    write_distribution("nyc12x10_synth.csv", grid_demand(12, 10, 100))
    write_distribution("maritime_capacity.csv", maritime_capacity(30))
    trips_demo(os.path.join(HERE, "trips_demo.csv"))


if __name__ == "__main__":
    main()
