// Core value types for tidal lagoon operation scheduling: plant
// configuration, tide and price series, per-step operating modes and the
// resulting schedule trajectory. All types are immutable value objects once
// built and safe to share across threads.
//
// Unit conventions: lengths in m, areas in m2, flow in m3/s (positive =
// water leaving the basin), power in MW, energy in MWh, time internally in
// seconds. Water levels are relative to an arbitrary fixed datum; only
// differences enter the model.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lagoon {

/// Optimization goal: total generated energy or day-ahead market revenue.
enum class Objective { MaxEnergy, MaxRevenue };

inline const char* to_string(Objective o) {
  return o == Objective::MaxEnergy ? "max-energy" : "max-revenue";
}

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double span() const { return hi - lo; }
};

/// Physical and operational parameters of an ebb-generation tidal lagoon.
///
/// The fill-phase flow laws come in two flavors: the nonlinear orifice
/// equation (discharge coefficients) and its linear secant approximation
/// (k coefficients, m3/s per m of head per m2 of gate area).
struct LagoonConfig {
  double surface_area_m2 = 0.0;      // basin plan area
  int n_turbines = 0;                // identical units
  double turbine_capacity_mw = 0.0;  // rated power per turbine
  double turbine_flow_area_m2 = 0.0; // per-turbine cross-sectional flow area
  int n_sluices = 0;
  double sluice_area_m2 = 0.0;       // per-gate flow area
  double discharge_coeff_sluice = 0.0;
  double discharge_coeff_turbine = 0.0;
  double k_sluice = 0.0;             // fitted linear fill coefficient, gates
  double k_turbine = 0.0;            // fitted linear fill coefficient, turbines
  double h_min_m = 0.0;              // generation start head
  Interval h_bounds_m;               // admissible head difference range
  double dt_s = 0.0;                 // scheduling time step
  double gravity_ms2 = 9.81;
};

/// Checks every configuration invariant; returns one message per violation.
/// An empty result means the config is valid.
inline std::vector<std::string> validate_config(const LagoonConfig& c) {
  std::vector<std::string> errors;
  auto positive = [&](double v, const char* what) {
    if (!(v > 0.0)) errors.push_back(std::string("non-positive ") + what);
  };
  positive(c.surface_area_m2, "area (surface_area_m2)");
  positive(c.turbine_flow_area_m2, "area (turbine_flow_area_m2)");
  positive(c.sluice_area_m2, "area (sluice_area_m2)");
  positive(c.turbine_capacity_mw, "turbine_capacity_mw");
  if (c.n_turbines < 1) errors.push_back("n_turbines must be >= 1");
  if (c.n_sluices < 1) errors.push_back("n_sluices must be >= 1");
  if (!(c.h_bounds_m.lo < 0.0))
    errors.push_back("lower head bound must be negative");
  if (!(c.h_min_m > 0.0 && c.h_min_m < c.h_bounds_m.hi))
    errors.push_back("h_min must be positive and below upper head bound");
  positive(c.dt_s, "dt_s");
  positive(c.gravity_ms2, "gravity_ms2");
  auto coeff_ok = [&](double v, const char* what) {
    if (!(v > 0.0 && v <= 1.5))
      errors.push_back(std::string(what) + " must be in (0, 1.5]");
  };
  coeff_ok(c.discharge_coeff_sluice, "discharge_coeff_sluice");
  coeff_ok(c.discharge_coeff_turbine, "discharge_coeff_turbine");
  positive(c.k_sluice, "k_sluice");
  positive(c.k_turbine, "k_turbine");
  return errors;
}

/// Throwing wrapper around validate_config for call sites that cannot
/// proceed with a broken config.
inline const LagoonConfig& validated(const LagoonConfig& c) {
  auto errors = validate_config(c);
  if (!errors.empty()) {
    std::string msg = "invalid lagoon config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return c;
}

/// Sea level outside the basin, sampled at every step boundary. A horizon of
/// T steps carries T+1 samples so both endpoints of each step are defined.
struct TideSeries {
  std::int64_t t0 = 0;  // timestamp label of the first sample
  double dt_s = 0.0;
  std::vector<double> levels_m;

  std::size_t steps() const {
    return levels_m.size() < 2 ? 0 : levels_m.size() - 1;
  }
};

/// Day-ahead price per scheduling step (currency/MWh). Negative prices are
/// legal market outcomes and accepted everywhere.
struct PriceSeries {
  std::int64_t t0 = 0;
  double dt_s = 0.0;
  std::vector<double> prices;
};

/// Per-step operating decision. Fill opens gates and idle turbines to move
/// bulk water, Hold closes everything, Generate(n) runs n identical turbines.
class Mode {
 public:
  enum class Phase { Hold, Fill, Generate };

  Mode() = default;

  static Mode hold() { return Mode(Phase::Hold, 0); }
  static Mode fill() { return Mode(Phase::Fill, 0); }
  static Mode generate(int n_active) {
    if (n_active < 1) throw std::invalid_argument("generate needs n_active >= 1");
    return Mode(Phase::Generate, n_active);
  }

  Phase phase() const { return phase_; }
  bool is_hold() const { return phase_ == Phase::Hold; }
  bool is_fill() const { return phase_ == Phase::Fill; }
  bool is_generate() const { return phase_ == Phase::Generate; }

  /// Number of generating turbines; 0 unless Generate.
  int n_active() const { return n_active_; }

  friend bool operator==(const Mode& a, const Mode& b) {
    return a.phase_ == b.phase_ && a.n_active_ == b.n_active_;
  }
  friend bool operator!=(const Mode& a, const Mode& b) { return !(a == b); }

 private:
  Mode(Phase p, int n) : phase_(p), n_active_(n) {}

  Phase phase_ = Phase::Hold;
  int n_active_ = 0;
};

/// Full decision and state trajectory over a horizon of T steps.
/// z_in_m[t] is the basin level at the START of step t (length T+1); all
/// per-step quantities are indexed by step.
struct Schedule {
  std::vector<Mode> modes;                // T
  std::vector<double> z_in_m;             // T+1
  std::vector<double> head_m;             // T, z_in - z_out at step start
  std::vector<double> q_sluice_m3s;       // T, aggregate over all gates
  std::vector<double> q_turbine_fill_m3s; // T, aggregate over all turbines
  std::vector<double> q_turbine_gen_m3s;  // T, aggregate over active turbines
  std::vector<double> q_total_m3s;        // T
  std::vector<double> power_mw;           // T
  std::vector<double> energy_mwh;         // T
  std::vector<double> revenue;            // T

  std::size_t steps() const { return modes.size(); }
};

struct SolverStats {
  long long states_expanded = 0;
  double wall_time_s = 0.0;
  double level_resolution_m = 0.0;
  std::size_t grid_points = 0;
};

struct SolverResult {
  Schedule schedule;
  double objective_value = 0.0;  // MWh or currency, per objective
  SolverStats stats;
};

/// Raised when no admissible operation exists (head bounds cannot be kept).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Objective value of a fixed schedule: total energy, or the price-weighted
/// sum for revenue.
inline double evaluate_objective(const Schedule& schedule,
                                 const PriceSeries& prices,
                                 Objective objective) {
  if (prices.prices.size() != schedule.steps())
    throw std::invalid_argument("price series length does not match schedule");
  double total = 0.0;
  for (std::size_t t = 0; t < schedule.steps(); ++t) {
    total += objective == Objective::MaxEnergy
                 ? schedule.energy_mwh[t]
                 : prices.prices[t] * schedule.energy_mwh[t];
  }
  return total;
}

/// Verifies the arithmetic identities every schedule must satisfy against
/// its tide input: the mass balance between consecutive levels, the head
/// definition, the power-energy relation and the head bounds. Independent of
/// any solver; returns one message per violated identity.
inline std::vector<std::string> check_schedule_identities(
    const Schedule& s, const TideSeries& tide, const LagoonConfig& config,
    double tol = 1e-9) {
  std::vector<std::string> errors;
  const std::size_t T = s.steps();
  auto bad = [&](std::size_t t, const std::string& what, double residual) {
    errors.push_back("step " + std::to_string(t) + ": " + what +
                     " residual " + std::to_string(residual));
  };
  if (s.z_in_m.size() != T + 1 || tide.levels_m.size() != T + 1) {
    errors.push_back("trajectory/tide length mismatch");
    return errors;
  }
  for (std::size_t t = 0; t < T; ++t) {
    const double mass = s.z_in_m[t + 1] -
                        (s.z_in_m[t] - s.q_total_m3s[t] * config.dt_s /
                                           config.surface_area_m2);
    if (std::abs(mass) > tol) bad(t, "mass balance", mass);
    const double head = s.head_m[t] - (s.z_in_m[t] - tide.levels_m[t]);
    if (std::abs(head) > tol) bad(t, "head definition", head);
    const double energy =
        s.energy_mwh[t] - s.power_mw[t] * config.dt_s / 3600.0;
    if (std::abs(energy) > tol) bad(t, "power-energy relation", energy);
    if (s.head_m[t] < config.h_bounds_m.lo - tol ||
        s.head_m[t] > config.h_bounds_m.hi + tol)
      bad(t, "head outside bounds", s.head_m[t]);
    const double split = s.q_total_m3s[t] -
                         (s.q_sluice_m3s[t] + s.q_turbine_fill_m3s[t] +
                          s.q_turbine_gen_m3s[t]);
    if (std::abs(split) > tol) bad(t, "flow components", split);
  }
  return errors;
}

}  // namespace lagoon
