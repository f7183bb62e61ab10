// Forward nonlinear simulator: replays a mode sequence against the true
// orifice fill equations and the exact hill chart with sub-stepping, to
// measure how far the linearized schedule drifts from the physics it
// approximates. Strictly more faithful than the optimizer's step model:
// the tide is interpolated within each step and flows and power track the
// instantaneous head.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagoon/core.hpp"
#include "lagoon/physics.hpp"

namespace lagoon {

/// Nonlinear replay of a mode sequence, with the same per-step trajectory
/// columns as a Schedule (flows and power are step averages, heads are
/// step-start instantaneous) plus the per-step deviation from the linearized
/// replay of the same modes.
struct SimulatedTrajectory {
  std::vector<Mode> modes;
  std::vector<double> z_in_m;             // T+1 step-boundary levels
  std::vector<double> head_m;             // T, at step start
  std::vector<double> q_sluice_m3s;       // T, step averages
  std::vector<double> q_turbine_fill_m3s;
  std::vector<double> q_turbine_gen_m3s;
  std::vector<double> q_total_m3s;
  std::vector<double> power_mw;           // T, step averages
  std::vector<double> energy_mwh;         // T
  std::vector<double> revenue;            // T, zero without prices
  double substep_s = 0.0;
  std::vector<double> dev_level_m;        // |nonlinear - linear| per step end
  std::vector<double> dev_energy_mwh;     // |nonlinear - linear| per step

  std::size_t steps() const { return modes.size(); }
};

/// Replays modes against the nonlinear flow laws with explicit sub-stepping.
/// substep_s must divide the scheduling step. The fill flow is clamped each
/// sub-step so the head cannot overshoot past zero (equalization clamp);
/// the run aborts if the head leaves the admissible bounds, naming the
/// offending sub-step. The basin starts at the first sea-level sample unless
/// z_start overrides it.
inline SimulatedTrajectory simulate(const LagoonConfig& config,
                                    const TideSeries& tide,
                                    std::span<const Mode> modes,
                                    double substep_s,
                                    const PriceSeries* prices = nullptr,
                                    std::optional<double> z_start = {}) {
  validated(config);
  const std::size_t T = modes.size();
  if (tide.levels_m.size() != T + 1)
    throw std::invalid_argument("tide series must have one more sample than modes");
  if (prices && prices->prices.size() != T)
    throw std::invalid_argument("price series length does not match modes");
  if (!(substep_s > 0.0) ||
      std::abs(config.dt_s / substep_s -
               std::round(config.dt_s / substep_s)) > 1e-9)
    throw std::invalid_argument("substep must divide the scheduling step");
  const auto n_sub = static_cast<std::size_t>(
      std::llround(config.dt_s / substep_s));

  SimulatedTrajectory sim;
  sim.modes.assign(modes.begin(), modes.end());
  sim.substep_s = substep_s;
  sim.z_in_m.resize(T + 1);
  sim.head_m.resize(T);
  sim.q_sluice_m3s.assign(T, 0.0);
  sim.q_turbine_fill_m3s.assign(T, 0.0);
  sim.q_turbine_gen_m3s.assign(T, 0.0);
  sim.q_total_m3s.assign(T, 0.0);
  sim.power_mw.assign(T, 0.0);
  sim.energy_mwh.assign(T, 0.0);
  sim.revenue.assign(T, 0.0);
  sim.dev_level_m.resize(T);
  sim.dev_energy_mwh.resize(T);

  const Schedule linear = build_schedule(config, tide, prices, modes, z_start);
  const Interval bounds = config.h_bounds_m;
  const double area = config.surface_area_m2;
  constexpr double kEps = 1e-9;

  double z = z_start.value_or(tide.levels_m[0]);
  sim.z_in_m[0] = z;
  for (std::size_t t = 0; t < T; ++t) {
    sim.head_m[t] = z - tide.levels_m[t];
    double sum_qs = 0.0, sum_qtf = 0.0, sum_qtg = 0.0, sum_p = 0.0;
    for (std::size_t k = 0; k < n_sub; ++k) {
      const double frac =
          (static_cast<double>(k) * substep_s) / config.dt_s;
      const double z_out = tide.levels_m[t] +
                           frac * (tide.levels_m[t + 1] - tide.levels_m[t]);
      const double head = z - z_out;
      if (head < bounds.lo - kEps || head > bounds.hi + kEps)
        throw InfeasibleError(
            "head " + std::to_string(head) + " left bounds at step " +
            std::to_string(t) + ", sub-step " + std::to_string(k));

      FlowComponents flow =
          lagoon_flow(modes[t], head, config, FlowLaw::Nonlinear);
      if (modes[t].is_fill() && flow.total_m3s != 0.0) {
        // Within one sub-step the level may move at most to equalization;
        // scale all fill components together if the raw flow would cross it.
        const double q_eq = head * area / substep_s;
        if (std::abs(flow.total_m3s) > std::abs(q_eq)) {
          const double scale = q_eq / flow.total_m3s;
          flow.sluice_m3s *= scale;
          flow.turbine_fill_m3s *= scale;
          flow.total_m3s = q_eq;
        }
      }
      const double power = plant_power_mw(modes[t], head, config);

      sum_qs += flow.sluice_m3s;
      sum_qtf += flow.turbine_fill_m3s;
      sum_qtg += flow.turbine_gen_m3s;
      sum_p += power;
      z = z - flow.total_m3s * substep_s / area;
    }
    const double inv = 1.0 / static_cast<double>(n_sub);
    sim.q_sluice_m3s[t] = sum_qs * inv;
    sim.q_turbine_fill_m3s[t] = sum_qtf * inv;
    sim.q_turbine_gen_m3s[t] = sum_qtg * inv;
    sim.q_total_m3s[t] =
        sim.q_sluice_m3s[t] + sim.q_turbine_fill_m3s[t] +
        sim.q_turbine_gen_m3s[t];
    sim.power_mw[t] = sum_p * inv;
    sim.energy_mwh[t] = sum_p * substep_s / 3600.0;
    sim.revenue[t] = prices ? prices->prices[t] * sim.energy_mwh[t] : 0.0;
    sim.z_in_m[t + 1] = z;
    sim.dev_level_m[t] = std::abs(z - linear.z_in_m[t + 1]);
    sim.dev_energy_mwh[t] =
        std::abs(sim.energy_mwh[t] - linear.energy_mwh[t]);
  }
  // End-of-horizon head must close within bounds as well.
  {
    const double head_end = z - tide.levels_m[T];
    if (head_end < bounds.lo - kEps || head_end > bounds.hi + kEps)
      throw InfeasibleError("head " + std::to_string(head_end) +
                            " left bounds at the end of the horizon");
  }
  return sim;
}

/// Per-step and aggregate gaps between a linearized schedule and a
/// nonlinear replay of the same horizon.
struct DeviationReport {
  std::vector<double> d_level_m;     // |Δ z_in| at each step end
  std::vector<double> d_energy_mwh;  // |Δ energy| per step
  std::vector<double> d_revenue;     // |Δ revenue| per step
  double total_energy_dev_mwh = 0.0;   // |Σ energy_sched - Σ energy_sim|
  double total_revenue_dev = 0.0;
  double rel_total_energy_dev = 0.0;   // relative to the schedule total
  double max_level_dev_m = 0.0;
  double rms_level_dev_m = 0.0;
  double max_energy_dev_mwh = 0.0;
  double rms_energy_dev_mwh = 0.0;
};

inline DeviationReport compare(const Schedule& schedule,
                               const SimulatedTrajectory& sim) {
  const std::size_t T = schedule.steps();
  if (sim.steps() != T)
    throw std::invalid_argument("schedule and simulation horizons differ");
  DeviationReport rep;
  rep.d_level_m.resize(T);
  rep.d_energy_mwh.resize(T);
  rep.d_revenue.resize(T);
  double e_sched = 0.0, e_sim = 0.0, r_sched = 0.0, r_sim = 0.0;
  double ss_level = 0.0, ss_energy = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    rep.d_level_m[t] = std::abs(schedule.z_in_m[t + 1] - sim.z_in_m[t + 1]);
    rep.d_energy_mwh[t] =
        std::abs(schedule.energy_mwh[t] - sim.energy_mwh[t]);
    rep.d_revenue[t] = std::abs(schedule.revenue[t] - sim.revenue[t]);
    rep.max_level_dev_m = std::max(rep.max_level_dev_m, rep.d_level_m[t]);
    rep.max_energy_dev_mwh =
        std::max(rep.max_energy_dev_mwh, rep.d_energy_mwh[t]);
    ss_level += rep.d_level_m[t] * rep.d_level_m[t];
    ss_energy += rep.d_energy_mwh[t] * rep.d_energy_mwh[t];
    e_sched += schedule.energy_mwh[t];
    e_sim += sim.energy_mwh[t];
    r_sched += schedule.revenue[t];
    r_sim += sim.revenue[t];
  }
  rep.total_energy_dev_mwh = std::abs(e_sched - e_sim);
  rep.total_revenue_dev = std::abs(r_sched - r_sim);
  rep.rel_total_energy_dev =
      e_sched != 0.0 ? rep.total_energy_dev_mwh / std::abs(e_sched) : 0.0;
  if (T > 0) {
    rep.rms_level_dev_m = std::sqrt(ss_level / static_cast<double>(T));
    rep.rms_energy_dev_mwh = std::sqrt(ss_energy / static_cast<double>(T));
  }
  return rep;
}

}  // namespace lagoon
