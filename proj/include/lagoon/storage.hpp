// Storage capability of the lagoon as a time-varying quantity: with the
// basin held at its highest attainable level while the sea moves, how much
// electrical energy could the plant produce in a single step. Plus scalar
// schedule summaries (totals and capacity factor).

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "lagoon/core.hpp"
#include "lagoon/physics.hpp"

namespace lagoon {

/// Per-step maximum one-step producible energy at a full basin.
struct StorageProfile {
  std::vector<double> stored_energy_mwh;  // T
  std::vector<double> head_m;             // T, z_max - z_out at step start
  double z_max_m = 0.0;                   // basin-full reference level
};

/// The basin-full level is the horizon maximum of the sea level (the highest
/// the lagoon could have been filled during the window). Heads beyond the
/// hill-chart domain are clamped to its 8 m edge before the power lookup.
inline StorageProfile storage_profile(const LagoonConfig& config,
                                      const TideSeries& tide) {
  validated(config);
  if (tide.levels_m.size() < 2)
    throw std::invalid_argument("tide series needs at least two samples");
  StorageProfile profile;
  profile.z_max_m =
      *std::max_element(tide.levels_m.begin(), tide.levels_m.end());
  const std::size_t T = tide.steps();
  profile.stored_energy_mwh.resize(T);
  profile.head_m.resize(T);
  const double cap = std::min(config.h_bounds_m.hi, kHillChartHeadMax);
  for (std::size_t t = 0; t < T; ++t) {
    const double head = profile.z_max_m - tide.levels_m[t];
    profile.head_m[t] = head;
    const double h_eval = std::min(head, cap);
    profile.stored_energy_mwh[t] = config.n_turbines *
                                   turbine_power(h_eval, config.h_min_m) *
                                   config.dt_s / 3600.0;
  }
  return profile;
}

struct ScheduleTotals {
  double energy_mwh = 0.0;
  double revenue = 0.0;
  double capacity_factor = 0.0;  // energy / (fleet capacity * horizon)
};

inline ScheduleTotals summarize(const LagoonConfig& config,
                                const Schedule& schedule,
                                const PriceSeries& prices) {
  if (prices.prices.size() != schedule.steps())
    throw std::invalid_argument("price series length does not match schedule");
  ScheduleTotals totals;
  for (std::size_t t = 0; t < schedule.steps(); ++t) {
    totals.energy_mwh += schedule.energy_mwh[t];
    totals.revenue += prices.prices[t] * schedule.energy_mwh[t];
  }
  const double horizon_h =
      static_cast<double>(schedule.steps()) * config.dt_s / 3600.0;
  const double fleet_mw = config.n_turbines * config.turbine_capacity_mw;
  if (horizon_h > 0.0 && fleet_mw > 0.0)
    totals.capacity_factor = totals.energy_mwh / (fleet_mw * horizon_h);
  return totals;
}

}  // namespace lagoon
