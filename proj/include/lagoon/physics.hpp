// Flow and power curves of the lagoon model: nonlinear orifice flow through
// gates and idle turbines, its linear secant approximation for the
// optimization model, and the piecewise-linear turbine hill chart (flow and
// power versus head). Everything here is a pure function of its inputs.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lagoon/core.hpp"

namespace lagoon {

/// Piecewise-affine function of head. Interval k is [breakpoints[k],
/// breakpoints[k+1]), except the last interval which is closed, so every
/// head in the domain maps to exactly one segment.
struct PiecewiseLinear {
  struct Affine {
    double a = 0.0;  // value = a + b * h
    double b = 0.0;
  };

  std::vector<double> breakpoints;  // strictly ascending, size = segments + 1
  std::vector<Affine> segments;

  int segment_index(double h) const {
    if (breakpoints.size() < 2 || segments.size() + 1 != breakpoints.size())
      throw std::logic_error("malformed piecewise-linear function");
    if (h < breakpoints.front() || h > breakpoints.back())
      throw std::domain_error("head outside piecewise function domain");
    if (h == breakpoints.back()) return static_cast<int>(segments.size()) - 1;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), h);
    return static_cast<int>(it - breakpoints.begin()) - 1;
  }

  double operator()(double h) const {
    const auto& seg = segments[static_cast<std::size_t>(segment_index(h))];
    return seg.a + seg.b * h;
  }
};

/// Signed orifice flow through an opening of the given area: the classic
/// sqrt(2 g |H|) law, oriented so positive head drives outflow and negative
/// head drives inflow. Odd in the head.
inline double orifice_flow(double head_m, double coeff, double area_m2,
                           double g) {
  const double mag = coeff * area_m2 * std::sqrt(2.0 * g * std::abs(head_m));
  return head_m < 0.0 ? -mag : (head_m > 0.0 ? mag : 0.0);
}

/// Linear fill-flow approximation: k * area * head, signed through the
/// origin. k is a fitted secant coefficient (see fit_linear_coefficient).
inline double linear_fill_flow(double head_m, double k, double area_m2) {
  return k * area_m2 * head_m;
}

/// Least-squares secant coefficient k approximating the orifice law
/// coeff*sqrt(2 g H) by k*H over n_samples uniform heads in [h_lo, h_hi]:
///   k = sum(coeff*sqrt(2 g H_j) * H_j) / sum(H_j^2).
/// With n_samples == 1 the single sample sits at h_lo and k reduces to the
/// exact point ratio. The approximation is only intended for head ranges
/// below 7 m.
inline double fit_linear_coefficient(double h_lo, double h_hi, double coeff,
                                     double g, int n_samples) {
  if (!(h_lo > 0.0) || !(h_lo < h_hi) || !(h_hi <= 7.0))
    throw std::invalid_argument(
        "fit range must satisfy 0 < h_lo < h_hi <= 7");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const double h =
        n_samples == 1
            ? h_lo
            : h_lo + (h_hi - h_lo) * static_cast<double>(j) /
                         static_cast<double>(n_samples - 1);
    num += coeff * std::sqrt(2.0 * g * h) * h;
    den += h * h;
  }
  return num / den;
}

/// Hill-chart domain: the turbine curves are defined for heads in [0, 8] m.
inline constexpr double kHillChartHeadMax = 8.0;

namespace hillchart {
// Affine coefficients of the turbine hill chart for a 20 MW bulb unit.
// Flow rises steeply after the startup head, flattens, and falls past the
// 7 m best-efficiency point; power ramps linearly to the 20 MW rating.
inline constexpr double kFlowA1 = 92.99, kFlowB1 = 77.60;
inline constexpr double kFlowA2 = 337.60, kFlowB2 = 14.81;
inline constexpr double kFlowA3 = 807.19, kFlowB3 = -52.83;
inline constexpr double kFlowBreak1 = 3.9, kFlowBreak2 = 7.0;
inline constexpr double kPowerA = -3.33, kPowerB = 3.33;
inline constexpr double kPowerCap = 20.0, kPowerBreak = 7.0;
}  // namespace hillchart

/// Per-turbine generation flow (m3/s) as a piecewise function of head.
inline PiecewiseLinear turbine_gen_flow_curve(double h_min = 1.0) {
  using namespace hillchart;
  return PiecewiseLinear{
      {0.0, h_min, kFlowBreak1, kFlowBreak2, kHillChartHeadMax},
      {{0.0, 0.0},
       {kFlowA1, kFlowB1},
       {kFlowA2, kFlowB2},
       {kFlowA3, kFlowB3}}};
}

/// Per-turbine electrical power (MW) as a piecewise function of head.
inline PiecewiseLinear turbine_power_curve(double h_min = 1.0) {
  using namespace hillchart;
  return PiecewiseLinear{{0.0, h_min, kPowerBreak, kHillChartHeadMax},
                         {{0.0, 0.0}, {kPowerA, kPowerB}, {kPowerCap, 0.0}}};
}

/// Per-turbine generation flow at the given head, 0 below the startup head.
/// Head must lie in the hill-chart domain [0, 8].
inline double turbine_gen_flow(double head_m, double h_min = 1.0) {
  using namespace hillchart;
  if (head_m < 0.0 || head_m > kHillChartHeadMax)
    throw std::domain_error("head outside hill-chart domain [0, 8]");
  if (head_m < h_min) return 0.0;
  if (head_m < kFlowBreak1) return kFlowA1 + kFlowB1 * head_m;
  if (head_m < kFlowBreak2) return kFlowA2 + kFlowB2 * head_m;
  return kFlowA3 + kFlowB3 * head_m;
}

/// Per-turbine power at the given head, 0 below the startup head, capped at
/// the 20 MW rating from 7 m up. Head must lie in [0, 8].
inline double turbine_power(double head_m, double h_min = 1.0) {
  using namespace hillchart;
  if (head_m < 0.0 || head_m > kHillChartHeadMax)
    throw std::domain_error("head outside hill-chart domain [0, 8]");
  if (head_m < h_min) return 0.0;
  if (head_m < kPowerBreak) return kPowerA + kPowerB * head_m;
  return kPowerCap;
}

/// Which fill-flow law to evaluate: the linear approximation used by the
/// optimizers, or the true orifice equation used by the replay simulator.
enum class FlowLaw { Linear, Nonlinear };

/// Aggregate flow split for one step, m3/s, positive = leaving the basin.
struct FlowComponents {
  double sluice_m3s = 0.0;        // all gates
  double turbine_fill_m3s = 0.0;  // all turbines, fill phase
  double turbine_gen_m3s = 0.0;   // active turbines, generating
  double total_m3s = 0.0;
};

/// Aggregate basin flow for a mode at a given head. Filling routes water
/// through every gate and every (idle) turbine under the chosen flow law;
/// generating routes water through the active turbines' hill chart, which is
/// zero below the startup head. Heads above the hill-chart domain are
/// evaluated at its 8 m edge.
inline FlowComponents lagoon_flow(Mode mode, double head_m,
                                  const LagoonConfig& config, FlowLaw law) {
  FlowComponents flow;
  switch (mode.phase()) {
    case Mode::Phase::Hold:
      break;
    case Mode::Phase::Fill: {
      const double per_gate =
          law == FlowLaw::Linear
              ? linear_fill_flow(head_m, config.k_sluice, config.sluice_area_m2)
              : orifice_flow(head_m, config.discharge_coeff_sluice,
                             config.sluice_area_m2, config.gravity_ms2);
      const double per_turbine =
          law == FlowLaw::Linear
              ? linear_fill_flow(head_m, config.k_turbine,
                                 config.turbine_flow_area_m2)
              : orifice_flow(head_m, config.discharge_coeff_turbine,
                             config.turbine_flow_area_m2, config.gravity_ms2);
      flow.sluice_m3s = config.n_sluices * per_gate;
      flow.turbine_fill_m3s = config.n_turbines * per_turbine;
      break;
    }
    case Mode::Phase::Generate: {
      if (head_m >= config.h_min_m) {
        const double h = std::min(head_m, kHillChartHeadMax);
        flow.turbine_gen_m3s =
            mode.n_active() * turbine_gen_flow(h, config.h_min_m);
      }
      break;
    }
  }
  flow.total_m3s =
      flow.sluice_m3s + flow.turbine_fill_m3s + flow.turbine_gen_m3s;
  return flow;
}

/// Basin mass balance over one step: the level drops by Q*dt/A.
inline double step_level(double z_in_m, double total_flow_m3s,
                         double surface_area_m2, double dt_s) {
  return z_in_m - total_flow_m3s * dt_s / surface_area_m2;
}

/// Electrical power of the whole plant for a mode at a given head (step-start
/// evaluation, heads above the hill chart clamped to its 8 m edge).
inline double plant_power_mw(Mode mode, double head_m,
                             const LagoonConfig& config) {
  if (!mode.is_generate() || head_m < config.h_min_m) return 0.0;
  const double h = std::min(head_m, kHillChartHeadMax);
  return mode.n_active() * turbine_power(h, config.h_min_m);
}

/// Replays a mode sequence through the linearized step model (explicit
/// scheme, head frozen at each step start) and assembles the full schedule
/// trajectory. The initial basin level equals the sea level at the first
/// sample unless z_start overrides it. Pass prices to fill the revenue
/// column, nullptr to leave it zero.
inline Schedule build_schedule(const LagoonConfig& config,
                               const TideSeries& tide,
                               const PriceSeries* prices,
                               std::span<const Mode> modes,
                               std::optional<double> z_start = {}) {
  const std::size_t T = modes.size();
  if (tide.levels_m.size() != T + 1)
    throw std::invalid_argument("tide series must have one more sample than modes");
  if (prices && prices->prices.size() != T)
    throw std::invalid_argument("price series length does not match modes");

  Schedule s;
  s.modes.assign(modes.begin(), modes.end());
  s.z_in_m.resize(T + 1);
  s.head_m.resize(T);
  s.q_sluice_m3s.resize(T);
  s.q_turbine_fill_m3s.resize(T);
  s.q_turbine_gen_m3s.resize(T);
  s.q_total_m3s.resize(T);
  s.power_mw.resize(T);
  s.energy_mwh.resize(T);
  s.revenue.resize(T);

  s.z_in_m[0] = z_start.value_or(tide.levels_m[0]);
  for (std::size_t t = 0; t < T; ++t) {
    if (modes[t].n_active() > config.n_turbines)
      throw std::invalid_argument("mode activates more turbines than the fleet has");
    const double head = s.z_in_m[t] - tide.levels_m[t];
    const FlowComponents flow =
        lagoon_flow(modes[t], head, config, FlowLaw::Linear);
    s.head_m[t] = head;
    s.q_sluice_m3s[t] = flow.sluice_m3s;
    s.q_turbine_fill_m3s[t] = flow.turbine_fill_m3s;
    s.q_turbine_gen_m3s[t] = flow.turbine_gen_m3s;
    s.q_total_m3s[t] = flow.total_m3s;
    s.power_mw[t] = plant_power_mw(modes[t], head, config);
    s.energy_mwh[t] = s.power_mw[t] * config.dt_s / 3600.0;
    s.revenue[t] = prices ? prices->prices[t] * s.energy_mwh[t] : 0.0;
    s.z_in_m[t + 1] =
        step_level(s.z_in_m[t], flow.total_m3s, config.surface_area_m2,
                   config.dt_s);
  }
  return s;
}

/// Swansea Bay scale plant: 320 MW from 16 x 20 MW bulb turbines, 11.5 km2
/// basin, 800 m2 of sluice gates, 1 m startup head, 30-min scheduling step.
/// The linear fill coefficients are fitted over heads of 0.5..7 m with unit
/// discharge coefficients.
inline LagoonConfig swansea_config() {
  LagoonConfig c;
  c.surface_area_m2 = 11.5e6;
  c.n_turbines = 16;
  c.turbine_capacity_mw = 20.0;
  c.turbine_flow_area_m2 = 42.0;  // ~7.3 m runner diameter bulb turbine
  c.n_sluices = 8;
  c.sluice_area_m2 = 100.0;
  c.discharge_coeff_sluice = 1.0;
  c.discharge_coeff_turbine = 1.0;
  c.gravity_ms2 = 9.81;
  c.k_sluice = fit_linear_coefficient(0.5, 7.0, c.discharge_coeff_sluice,
                                      c.gravity_ms2, 1000);
  c.k_turbine = fit_linear_coefficient(0.5, 7.0, c.discharge_coeff_turbine,
                                       c.gravity_ms2, 1000);
  c.h_min_m = 1.0;
  c.h_bounds_m = {-2.0, 8.0};
  c.dt_s = 1800.0;
  return c;
}

}  // namespace lagoon
