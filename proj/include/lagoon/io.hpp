// File formats and data ingestion: timestamp,value CSV series, synthetic
// semidiurnal tides, the plain-text schedule document, per-step series
// tables for plotting, and JSON plant configuration. All writers are
// deterministic: the same values always produce the same bytes.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagoon/core.hpp"
#include "lagoon/milp.hpp"
#include "lagoon/physics.hpp"
#include "lagoon/sim.hpp"
#include "lagoon/storage.hpp"

#include <json.hpp>

namespace lagoon::io {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    if (!std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": malformed number '" + s + "'");
  }
}

inline std::int64_t parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": malformed integer '" + s + "'");
  }
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace detail

/// A parsed timestamp,value table with validated uniform spacing.
struct RawSeries {
  std::int64_t t0 = 0;
  double dt_s = 0.0;
  std::vector<double> values;
};

/// Parses a `timestamp,value` CSV (header required), validating that the
/// integer timestamps are uniformly spaced. Errors name the offending line.
inline RawSeries load_series_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file");
  if (lines[0] != "timestamp,value")
    throw ParseError(path + ":1: expected header 'timestamp,value'");
  RawSeries series;
  std::vector<std::int64_t> stamps;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty() && ln + 1 == lines.size()) break;  // trailing newline
    const std::string where = path + ":" + std::to_string(ln + 1);
    const auto fields = detail::split(lines[ln], ',');
    if (fields.size() != 2)
      throw ParseError(where + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    stamps.push_back(detail::parse_int(fields[0], where));
    series.values.push_back(detail::parse_double(fields[1], where));
  }
  if (stamps.size() < 2)
    throw ParseError(path + ": too few rows (need at least 2)");
  series.t0 = stamps[0];
  const std::int64_t gap = stamps[1] - stamps[0];
  if (gap <= 0) throw ParseError(path + ":3: timestamps must increase");
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    if (stamps[i] - stamps[i - 1] != gap)
      throw ParseError(path + ":" + std::to_string(i + 2) +
                       ": non-uniform timestamp spacing");
  }
  series.dt_s = static_cast<double>(gap);
  return series;
}

inline TideSeries load_tide_csv(const std::string& path) {
  const RawSeries raw = load_series_csv(path);
  return TideSeries{raw.t0, raw.dt_s, raw.values};
}

inline PriceSeries load_price_csv(const std::string& path) {
  const RawSeries raw = load_series_csv(path);
  return PriceSeries{raw.t0, raw.dt_s, raw.values};
}

/// Synthetic single-constituent tide:
/// levels[k] = mean + amplitude * sin(2*pi*k*dt/period + phase),
/// sampled at steps+1 boundaries so a horizon of `steps` steps is covered.
inline TideSeries synth_tide(double mean_m, double amplitude_m,
                             double period_s, double phase_rad,
                             std::int64_t t0, double dt_s, std::size_t steps) {
  if (!(amplitude_m >= 0.0)) throw std::invalid_argument("amplitude must be >= 0");
  if (!(period_s > 0.0)) throw std::invalid_argument("period must be positive");
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt must be positive");
  if (steps < 1) throw std::invalid_argument("need at least one step");
  TideSeries tide;
  tide.t0 = t0;
  tide.dt_s = dt_s;
  tide.levels_m.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(k) *
                           dt_s / period_s +
                       phase_rad;
    tide.levels_m[k] = mean_m + amplitude_m * std::sin(arg);
  }
  return tide;
}

inline PriceSeries flat_prices(double value, std::int64_t t0, double dt_s,
                               std::size_t steps) {
  return PriceSeries{t0, dt_s, std::vector<double>(steps, value)};
}

/// Price source shorthand: either `flat:<value>` or a CSV path.
inline PriceSeries load_price_source(const std::string& source,
                                     std::int64_t t0, double dt_s,
                                     std::size_t steps) {
  if (source.rfind("flat:", 0) == 0) {
    const double value =
        detail::parse_double(source.substr(5), "price source '" + source + "'");
    return flat_prices(value, t0, dt_s, steps);
  }
  return load_price_csv(source);
}

inline std::string mode_token(Mode m) {
  switch (m.phase()) {
    case Mode::Phase::Hold: return "hold";
    case Mode::Phase::Fill: return "fill";
    case Mode::Phase::Generate: return "gen:" + std::to_string(m.n_active());
  }
  return "hold";
}

inline Mode parse_mode_token(const std::string& token,
                             const std::string& where) {
  if (token == "hold") return Mode::hold();
  if (token == "fill") return Mode::fill();
  if (token.rfind("gen:", 0) == 0) {
    const std::int64_t n = detail::parse_int(token.substr(4), where);
    if (n < 1) throw ParseError(where + ": bad turbine count in '" + token + "'");
    return Mode::generate(static_cast<int>(n));
  }
  throw ParseError(where + ": unknown mode '" + token + "'");
}

/// A schedule document: the trajectory plus enough framing to replay or
/// check it (step length, timestamps, objective label, totals).
struct ScheduleDoc {
  Schedule schedule;
  std::int64_t t0 = 0;
  double dt_s = 0.0;
  std::string objective;  // "max-energy" | "max-revenue" | "replay"
  ScheduleTotals totals;
};

inline constexpr const char* kScheduleColumns =
    "step timestamp mode z_in_m z_out_m head_m q_sluice_m3s "
    "q_turbine_fill_m3s q_turbine_gen_m3s q_total_m3s power_mw energy_mwh "
    "revenue";

inline std::string render_schedule_doc(const LagoonConfig& config,
                                       const TideSeries& tide,
                                       const Schedule& s,
                                       const PriceSeries& prices,
                                       const std::string& objective) {
  const ScheduleTotals totals = summarize(config, s, prices);
  std::string out;
  out += "# tidal lagoon schedule\n";
  out += "version 1\n";
  out += "steps " + std::to_string(s.steps()) + "\n";
  out += "dt_s " + fmt(tide.dt_s) + "\n";
  out += "t0 " + std::to_string(tide.t0) + "\n";
  out += "objective " + objective + "\n";
  out += std::string("columns ") + kScheduleColumns + "\n";
  for (std::size_t t = 0; t < s.steps(); ++t) {
    const std::int64_t stamp =
        tide.t0 + static_cast<std::int64_t>(t) *
                      static_cast<std::int64_t>(tide.dt_s);
    out += "row " + std::to_string(t) + " " + std::to_string(stamp) + " " +
           mode_token(s.modes[t]) + " " + fmt(s.z_in_m[t]) + " " +
           fmt(tide.levels_m[t]) + " " + fmt(s.head_m[t]) + " " +
           fmt(s.q_sluice_m3s[t]) + " " + fmt(s.q_turbine_fill_m3s[t]) + " " +
           fmt(s.q_turbine_gen_m3s[t]) + " " + fmt(s.q_total_m3s[t]) + " " +
           fmt(s.power_mw[t]) + " " + fmt(s.energy_mwh[t]) + " " +
           fmt(s.revenue[t]) + "\n";
  }
  out += "final_z_in_m " + fmt(s.z_in_m[s.steps()]) + "\n";
  out += "total_energy_mwh " + fmt(totals.energy_mwh) + "\n";
  out += "total_revenue " + fmt(totals.revenue) + "\n";
  out += "capacity_factor " + fmt(totals.capacity_factor) + "\n";
  return out;
}

inline void write_schedule_doc(const std::string& path,
                               const LagoonConfig& config,
                               const TideSeries& tide, const Schedule& s,
                               const PriceSeries& prices,
                               const std::string& objective) {
  detail::write_file(path, render_schedule_doc(config, tide, s, prices,
                                               objective));
}

inline ScheduleDoc read_schedule_doc(const std::string& path) {
  const auto lines = detail::read_lines(path);
  ScheduleDoc doc;
  Schedule& s = doc.schedule;
  std::size_t n_steps = 0;
  bool have_final = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(ln + 1);
    std::istringstream iss(line);
    std::string key;
    iss >> key;
    if (key == "version" || key == "columns") {
      continue;
    } else if (key == "steps") {
      iss >> n_steps;
    } else if (key == "dt_s") {
      std::string v;
      iss >> v;
      doc.dt_s = detail::parse_double(v, where);
    } else if (key == "t0") {
      iss >> doc.t0;
    } else if (key == "objective") {
      iss >> doc.objective;
    } else if (key == "row") {
      std::size_t step;
      std::string stamp, mode;
      std::vector<std::string> nums(10);
      iss >> step >> stamp >> mode;
      for (auto& v : nums) iss >> v;
      if (!iss) throw ParseError(where + ": truncated row");
      if (step != s.modes.size())
        throw ParseError(where + ": rows out of order");
      s.modes.push_back(parse_mode_token(mode, where));
      s.z_in_m.push_back(detail::parse_double(nums[0], where));
      s.head_m.push_back(detail::parse_double(nums[2], where));
      s.q_sluice_m3s.push_back(detail::parse_double(nums[3], where));
      s.q_turbine_fill_m3s.push_back(detail::parse_double(nums[4], where));
      s.q_turbine_gen_m3s.push_back(detail::parse_double(nums[5], where));
      s.q_total_m3s.push_back(detail::parse_double(nums[6], where));
      s.power_mw.push_back(detail::parse_double(nums[7], where));
      s.energy_mwh.push_back(detail::parse_double(nums[8], where));
      s.revenue.push_back(detail::parse_double(nums[9], where));
    } else if (key == "final_z_in_m") {
      std::string v;
      iss >> v;
      s.z_in_m.push_back(detail::parse_double(v, where));
      have_final = true;
    } else if (key == "total_energy_mwh") {
      std::string v;
      iss >> v;
      doc.totals.energy_mwh = detail::parse_double(v, where);
    } else if (key == "total_revenue") {
      std::string v;
      iss >> v;
      doc.totals.revenue = detail::parse_double(v, where);
    } else if (key == "capacity_factor") {
      std::string v;
      iss >> v;
      doc.totals.capacity_factor = detail::parse_double(v, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  if (s.modes.size() != n_steps)
    throw ParseError(path + ": declared " + std::to_string(n_steps) +
                     " steps but found " + std::to_string(s.modes.size()));
  if (!have_final) throw ParseError(path + ": missing final_z_in_m");
  return doc;
}

/// Per-step series table suitable for plotting trajectories.
inline std::string render_series_csv(const TideSeries& tide,
                                     const Schedule& s,
                                     const PriceSeries& prices) {
  std::string out =
      "timestamp,z_out_m,z_in_m,head_m,q_sluice_m3s,q_turbine_fill_m3s,"
      "q_turbine_gen_m3s,q_total_m3s,power_mw,energy_mwh,revenue,price,"
      "n_active\n";
  for (std::size_t t = 0; t < s.steps(); ++t) {
    const std::int64_t stamp =
        tide.t0 + static_cast<std::int64_t>(t) *
                      static_cast<std::int64_t>(tide.dt_s);
    out += std::to_string(stamp);
    out += ',';
    out += fmt(tide.levels_m[t]);
    out += ',';
    out += fmt(s.z_in_m[t]);
    out += ',';
    out += fmt(s.head_m[t]);
    out += ',';
    out += fmt(s.q_sluice_m3s[t]);
    out += ',';
    out += fmt(s.q_turbine_fill_m3s[t]);
    out += ',';
    out += fmt(s.q_turbine_gen_m3s[t]);
    out += ',';
    out += fmt(s.q_total_m3s[t]);
    out += ',';
    out += fmt(s.power_mw[t]);
    out += ',';
    out += fmt(s.energy_mwh[t]);
    out += ',';
    out += fmt(s.revenue[t]);
    out += ',';
    out += fmt(prices.prices[t]);
    out += ',';
    out += std::to_string(s.modes[t].n_active());
    out += '\n';
  }
  return out;
}

inline std::string render_storage_csv(const TideSeries& tide,
                                      const StorageProfile& profile) {
  std::string out = "timestamp,z_out_m,full_basin_head_m,stored_energy_mwh\n";
  for (std::size_t t = 0; t < profile.stored_energy_mwh.size(); ++t) {
    const std::int64_t stamp =
        tide.t0 + static_cast<std::int64_t>(t) *
                      static_cast<std::int64_t>(tide.dt_s);
    out += std::to_string(stamp);
    out += ',';
    out += fmt(tide.levels_m[t]);
    out += ',';
    out += fmt(profile.head_m[t]);
    out += ',';
    out += fmt(profile.stored_energy_mwh[t]);
    out += '\n';
  }
  return out;
}

/// Output file set for a run; empty paths are skipped.
struct OutputTargets {
  std::string schedule_path;
  std::string series_path;
  std::string storage_path;
  std::string lp_path;
};

/// Writes every requested artifact of a run: the schedule document, the
/// per-step series table, the storage profile and the LP export.
inline void write_outputs(const LagoonConfig& config, const TideSeries& tide,
                          const PriceSeries& prices,
                          const SolverResult& result,
                          const std::string& objective,
                          const StorageProfile* storage,
                          const milp::MilpModel* model,
                          const OutputTargets& targets) {
  if (!targets.schedule_path.empty())
    write_schedule_doc(targets.schedule_path, config, tide, result.schedule,
                       prices, objective);
  if (!targets.series_path.empty())
    detail::write_file(targets.series_path,
                       render_series_csv(tide, result.schedule, prices));
  if (!targets.storage_path.empty() && storage)
    detail::write_file(targets.storage_path,
                       render_storage_csv(tide, *storage));
  if (!targets.lp_path.empty() && model)
    detail::write_file(targets.lp_path, milp::export_lp(*model));
}

/// Loads a plant configuration from JSON; unspecified fields keep their
/// Swansea-scale defaults. h_bounds_m is a two-element [lo, hi] array.
inline LagoonConfig load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  LagoonConfig c = swansea_config();
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  auto get_int = [&](const char* key, int& field) {
    if (j.contains(key)) field = j.at(key).get<int>();
  };
  get("surface_area_m2", c.surface_area_m2);
  get_int("n_turbines", c.n_turbines);
  get("turbine_capacity_mw", c.turbine_capacity_mw);
  get("turbine_flow_area_m2", c.turbine_flow_area_m2);
  get_int("n_sluices", c.n_sluices);
  get("sluice_area_m2", c.sluice_area_m2);
  get("discharge_coeff_sluice", c.discharge_coeff_sluice);
  get("discharge_coeff_turbine", c.discharge_coeff_turbine);
  get("k_sluice", c.k_sluice);
  get("k_turbine", c.k_turbine);
  get("h_min_m", c.h_min_m);
  get("dt_s", c.dt_s);
  get("gravity_ms2", c.gravity_ms2);
  if (j.contains("h_bounds_m")) {
    const auto& b = j.at("h_bounds_m");
    if (!b.is_array() || b.size() != 2)
      throw ParseError(path + ": h_bounds_m must be a [lo, hi] array");
    c.h_bounds_m = {b[0].get<double>(), b[1].get<double>()};
  }
  return c;
}

}  // namespace lagoon::io
