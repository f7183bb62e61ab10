// Exact dynamic programming over a discretized basin level, optimizing a
// mode sequence against the linearized step model, plus a brute-force
// enumerator over all mode sequences used as an optimality oracle on tiny
// instances. Both searches share the same grid rounding and the same
// feasibility rules, so their objective values agree exactly.

#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lagoon/core.hpp"
#include "lagoon/physics.hpp"

namespace lagoon::dp {

/// Deterministic preference order among equal-value actions: fewer active
/// turbines first, then Hold before Fill. This is the order action_set
/// returns and the order in which both searches scan candidates.
enum class TieBreak { FewerTurbinesThenHoldBeforeFill };

struct DpParams {
  double level_resolution_m = 0.01;
  /// Basin-level grid range; when unset it is derived from the tide extremes
  /// widened by the head bounds (no reachable level can fall outside that).
  std::optional<Interval> level_range_m;
  TieBreak tie_break = TieBreak::FewerTurbinesThenHoldBeforeFill;
  /// Extra shrink of the upper head bound during the search, on top of the
  /// one-grid-step guard applied to both bounds. The guard keeps the
  /// continuously re-simulated output schedule inside the true bounds
  /// despite per-step grid rounding; raise the margin when the schedule will
  /// be replayed under the nonlinear flow law, which fills faster and runs
  /// the head higher than the linear plan.
  double head_margin_hi_m = 0.0;
};

/// All admissible actions in tie-break order:
/// Hold, Fill, Generate(1), ..., Generate(n_turbines).
inline std::vector<Mode> action_set(const LagoonConfig& config) {
  std::vector<Mode> actions;
  actions.reserve(static_cast<std::size_t>(config.n_turbines) + 2);
  actions.push_back(Mode::hold());
  actions.push_back(Mode::fill());
  for (int n = 1; n <= config.n_turbines; ++n)
    actions.push_back(Mode::generate(n));
  return actions;
}

struct Transition {
  double z_next_m = 0.0;
  double energy_mwh = 0.0;
};

namespace detail {

/// One step of the linearized model with explicit head bounds. Returns
/// nothing when the step is inadmissible: head out of bounds at either
/// endpoint, or generation requested below the startup head.
inline std::optional<Transition> step_once(double z_in_m, std::size_t t,
                                           Mode mode,
                                           const LagoonConfig& config,
                                           const TideSeries& tide,
                                           double head_lo, double head_hi) {
  const double head = z_in_m - tide.levels_m[t];
  if (head < head_lo || head > head_hi) return std::nullopt;
  if (mode.is_generate() && head < config.h_min_m) return std::nullopt;
  const FlowComponents flow = lagoon_flow(mode, head, config, FlowLaw::Linear);
  const double z_next = step_level(z_in_m, flow.total_m3s,
                                   config.surface_area_m2, config.dt_s);
  const double head_end = z_next - tide.levels_m[t + 1];
  if (head_end < head_lo || head_end > head_hi) return std::nullopt;
  const double energy =
      plant_power_mw(mode, head, config) * config.dt_s / 3600.0;
  return Transition{z_next, energy};
}

/// Level grid shared by the two searches.
struct Grid {
  double lo = 0.0;
  double step = 0.0;
  std::size_t n = 0;

  double level(std::size_t i) const { return lo + step * static_cast<double>(i); }
  std::size_t nearest(double z) const {
    double idx = std::round((z - lo) / step);
    if (idx < 0.0) idx = 0.0;
    const double max_idx = static_cast<double>(n - 1);
    if (idx > max_idx) idx = max_idx;
    return static_cast<std::size_t>(idx);
  }
};

struct SearchSetup {
  Grid grid;
  double head_lo = 0.0;  // effective bounds used during the search
  double head_hi = 0.0;
  std::vector<Mode> actions;
};

inline SearchSetup make_setup(const LagoonConfig& config,
                              const TideSeries& tide, const DpParams& params) {
  if (!(params.level_resolution_m > 0.0))
    throw std::invalid_argument("level resolution must be positive");
  if (tide.levels_m.size() < 2)
    throw std::invalid_argument("tide series needs at least two samples");

  Interval range;
  if (params.level_range_m) {
    range = *params.level_range_m;
  } else {
    double tide_lo = tide.levels_m[0];
    double tide_hi = tide.levels_m[0];
    for (double z : tide.levels_m) {
      tide_lo = std::min(tide_lo, z);
      tide_hi = std::max(tide_hi, z);
    }
    range = {tide_lo + config.h_bounds_m.lo, tide_hi + config.h_bounds_m.hi};
  }

  SearchSetup setup;
  setup.grid.lo = range.lo;
  setup.grid.step = params.level_resolution_m;
  setup.grid.n =
      static_cast<std::size_t>(std::floor(range.span() / setup.grid.step)) + 1;
  // One grid step of slack on both head bounds absorbs the rounding drift
  // between the grid search and the continuous re-simulation of the output.
  setup.head_lo = config.h_bounds_m.lo + params.level_resolution_m;
  setup.head_hi = config.h_bounds_m.hi - params.level_resolution_m -
                  params.head_margin_hi_m;
  if (setup.head_lo >= setup.head_hi)
    throw std::invalid_argument("head margin leaves an empty head range");
  setup.actions = action_set(config);
  return setup;
}

inline double reward(Objective objective, const PriceSeries& prices,
                     std::size_t t, double energy_mwh) {
  return objective == Objective::MaxEnergy ? energy_mwh
                                           : prices.prices[t] * energy_mwh;
}

inline SolverResult finalize(const LagoonConfig& config,
                             const TideSeries& tide, const PriceSeries& prices,
                             Objective objective,
                             const std::vector<Mode>& modes,
                             SolverStats stats) {
  SolverResult result;
  result.schedule = build_schedule(config, tide, &prices, modes);
  result.objective_value =
      evaluate_objective(result.schedule, prices, objective);
  result.stats = stats;
  return result;
}

inline void validate_instance(const LagoonConfig& config,
                              const TideSeries& tide,
                              const PriceSeries& prices) {
  validated(config);
  if (tide.levels_m.size() < 2)
    throw std::invalid_argument("tide series needs at least two samples");
  if (prices.prices.size() + 1 != tide.levels_m.size())
    throw std::invalid_argument("price series must have one entry per step");
}

}  // namespace detail

/// One step of the linearized model under the true head bounds. Returns
/// nothing when the step is inadmissible (head leaving the bounds at either
/// endpoint, or generating below the startup head).
inline std::optional<Transition> transition(double z_in_m, std::size_t t,
                                            Mode mode,
                                            const LagoonConfig& config,
                                            const TideSeries& tide) {
  if (t >= tide.steps()) throw std::invalid_argument("step index out of range");
  return detail::step_once(z_in_m, t, mode, config, tide,
                           config.h_bounds_m.lo, config.h_bounds_m.hi);
}

/// Backward-induction DP over the level grid. The initial state is the grid
/// point nearest the first sea-level sample. During the search, successor
/// levels are rounded to the nearest grid point; the returned schedule
/// re-simulates the chosen action sequence with continuous levels, so its
/// trajectory satisfies the mass-balance identity exactly.
inline SolverResult optimize(const LagoonConfig& config, const TideSeries& tide,
                             const PriceSeries& prices, Objective objective,
                             const DpParams& params = {}) {
  using clock = std::chrono::steady_clock;
  const auto start_time = clock::now();

  detail::validate_instance(config, tide, prices);
  const detail::SearchSetup setup = detail::make_setup(config, tide, params);
  const detail::Grid& grid = setup.grid;
  const std::size_t T = tide.steps();
  const std::size_t n_actions = setup.actions.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // value[s] holds the best objective obtainable from level s at the stage
  // currently being expanded; best_action[t * n + s] the action achieving it.
  std::vector<double> value(grid.n, 0.0);
  std::vector<double> next_value(grid.n);
  std::vector<std::int16_t> best_action(T * grid.n, -1);
  std::vector<std::size_t> best_succ(T * grid.n, 0);

  SolverStats stats;
  stats.level_resolution_m = params.level_resolution_m;
  stats.grid_points = grid.n;

  for (std::size_t t = T; t-- > 0;) {
    next_value.swap(value);
    for (std::size_t s = 0; s < grid.n; ++s) {
      double best = kNegInf;
      std::int16_t best_a = -1;
      std::size_t best_s = 0;
      const double z = grid.level(s);
      for (std::size_t a = 0; a < n_actions; ++a) {
        const auto step = detail::step_once(z, t, setup.actions[a], config,
                                            tide, setup.head_lo,
                                            setup.head_hi);
        ++stats.states_expanded;
        if (!step) continue;
        const std::size_t succ = grid.nearest(step->z_next_m);
        if (next_value[succ] == kNegInf) continue;
        const double v =
            detail::reward(objective, prices, t, step->energy_mwh) +
            next_value[succ];
        if (v > best) {
          best = v;
          best_a = static_cast<std::int16_t>(a);
          best_s = succ;
        }
      }
      value[s] = best;
      best_action[t * grid.n + s] = best_a;
      best_succ[t * grid.n + s] = best_s;
    }
  }

  const std::size_t s0 = grid.nearest(tide.levels_m[0]);
  if (value[s0] == kNegInf) {
    // Distinguish "the tide alone forces the head out of bounds" from a
    // generic dead end, naming the offending step.
    for (std::size_t t = 0; t <= T; ++t) {
      bool any = false;
      for (std::size_t s = 0; s < grid.n && !any; ++s) {
        const double head = grid.level(s) - tide.levels_m[t];
        any = head >= setup.head_lo && head <= setup.head_hi;
      }
      if (!any)
        throw InfeasibleError("no admissible basin level at step " +
                              std::to_string(t) +
                              ": tide leaves the head bounds");
    }
    throw InfeasibleError("no feasible schedule from the initial level");
  }

  std::vector<Mode> modes;
  modes.reserve(T);
  std::size_t s = s0;
  for (std::size_t t = 0; t < T; ++t) {
    const std::int16_t a = best_action[t * grid.n + s];
    modes.push_back(setup.actions[static_cast<std::size_t>(a)]);
    s = best_succ[t * grid.n + s];
  }

  stats.wall_time_s =
      std::chrono::duration<double>(clock::now() - start_time).count();
  return detail::finalize(config, tide, prices, objective, modes, stats);
}

/// Evaluates every mode sequence with the same grid rounding, head margins
/// and tie-break order as optimize, returning the best. Guarded against
/// horizons where the sequence count exceeds 1e7; intended for oracle tests
/// on tiny instances.
inline SolverResult enumerate_exhaustive(const LagoonConfig& config,
                                         const TideSeries& tide,
                                         const PriceSeries& prices,
                                         Objective objective,
                                         const DpParams& params = {}) {
  using clock = std::chrono::steady_clock;
  const auto start_time = clock::now();

  detail::validate_instance(config, tide, prices);
  const detail::SearchSetup setup = detail::make_setup(config, tide, params);
  const std::size_t T = tide.steps();

  double sequence_count = 1.0;
  for (std::size_t t = 0; t < T; ++t)
    sequence_count *= static_cast<double>(setup.actions.size());
  if (sequence_count > 1e7)
    throw std::invalid_argument(
        "instance too large for exhaustive enumeration");

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  SolverStats stats;
  stats.level_resolution_m = params.level_resolution_m;
  stats.grid_points = setup.grid.n;

  std::vector<Mode> best_suffix;
  // Depth-first scan in tie-break order with strict improvement, so the
  // lexicographically earliest maximizer wins: the same sequence the DP's
  // per-state tie-breaking selects.
  auto recurse = [&](auto&& self, std::size_t t,
                     std::size_t s) -> std::pair<double, std::vector<Mode>> {
    if (t == T) return {0.0, {}};
    double best = kNegInf;
    std::vector<Mode> best_modes;
    const double z = setup.grid.level(s);
    for (const Mode& action : setup.actions) {
      const auto step = detail::step_once(z, t, action, config, tide,
                                          setup.head_lo, setup.head_hi);
      ++stats.states_expanded;
      if (!step) continue;
      auto [suffix_value, suffix] =
          self(self, t + 1, setup.grid.nearest(step->z_next_m));
      if (suffix_value == kNegInf) continue;
      const double v =
          detail::reward(objective, prices, t, step->energy_mwh) +
          suffix_value;
      if (v > best) {
        best = v;
        best_modes.clear();
        best_modes.push_back(action);
        best_modes.insert(best_modes.end(), suffix.begin(), suffix.end());
      }
    }
    return {best, std::move(best_modes)};
  };

  auto [best, modes] = recurse(recurse, 0, setup.grid.nearest(tide.levels_m[0]));
  if (best == kNegInf)
    throw InfeasibleError("no feasible schedule from the initial level");

  stats.wall_time_s =
      std::chrono::duration<double>(clock::now() - start_time).count();
  return detail::finalize(config, tide, prices, objective, modes, stats);
}

}  // namespace lagoon::dp
