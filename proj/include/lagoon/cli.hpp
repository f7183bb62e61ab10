// Command-line surface tying the library together: optimize a day-ahead
// schedule, replay it through the nonlinear simulator, compute the storage
// profile, export the MILP as LP text, and check a schedule file for
// feasibility. Exit codes: 0 success, 1 input error, 2 infeasibility.

#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lagoon/core.hpp"
#include "lagoon/dp.hpp"
#include "lagoon/io.hpp"
#include "lagoon/milp.hpp"
#include "lagoon/physics.hpp"
#include "lagoon/sim.hpp"
#include "lagoon/storage.hpp"

#include <CLI11.hpp>

namespace lagoon::cli {

namespace detail {

struct CommonOpts {
  std::string config_path;
  std::string tide_path;
  std::string synth_tide;  // "mean,amplitude,period,phase"
  std::size_t steps = 48;
  std::string out_dir = ".";
};

inline void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "plant configuration JSON (defaults to the Swansea-scale plant)");
  cmd->add_option("--tide", opts.tide_path, "tide CSV (timestamp,value)");
  cmd->add_option("--synth-tide", opts.synth_tide,
                  "synthetic tide 'mean,amplitude,period_s,phase_rad'");
  cmd->add_option("--steps", opts.steps,
                  "horizon steps for a synthetic tide (default 48)");
  cmd->add_option("--out-dir", opts.out_dir, "output directory (default .)");
}

inline LagoonConfig resolve_config(const CommonOpts& opts) {
  LagoonConfig config = opts.config_path.empty()
                            ? swansea_config()
                            : io::load_config_json(opts.config_path);
  return validated(config);
}

inline TideSeries resolve_tide(const CommonOpts& opts,
                               const LagoonConfig& config) {
  const bool has_file = !opts.tide_path.empty();
  const bool has_synth = !opts.synth_tide.empty();
  if (has_file == has_synth)
    throw std::invalid_argument(
        "exactly one of --tide and --synth-tide is required");
  if (has_file) {
    TideSeries tide = io::load_tide_csv(opts.tide_path);
    if (tide.dt_s != config.dt_s)
      throw std::invalid_argument("tide spacing " + io::fmt(tide.dt_s) +
                                  " s does not match config dt_s " +
                                  io::fmt(config.dt_s) + " s");
    return tide;
  }
  const auto fields = io::detail::split(opts.synth_tide, ',');
  if (fields.size() != 4)
    throw std::invalid_argument(
        "--synth-tide needs 'mean,amplitude,period_s,phase_rad'");
  const auto num = [&](int i) {
    return io::detail::parse_double(fields[static_cast<std::size_t>(i)],
                                    "--synth-tide");
  };
  return io::synth_tide(num(0), num(1), num(2), num(3), 0, config.dt_s,
                        opts.steps);
}

inline std::string out_path(const CommonOpts& opts, const char* name) {
  std::filesystem::create_directories(opts.out_dir);
  return (std::filesystem::path(opts.out_dir) / name).string();
}

inline Objective parse_objective(const std::string& name) {
  if (name == "max-energy") return Objective::MaxEnergy;
  if (name == "max-revenue") return Objective::MaxRevenue;
  throw std::invalid_argument("unknown objective '" + name +
                              "' (use max-energy or max-revenue)");
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Day-ahead operation scheduling for an ebb-generation tidal lagoon"};
  app.require_subcommand(1);

  detail::CommonOpts opt_common, sim_common, sto_common, lp_common, chk_common;
  std::string opt_prices = "flat:1", opt_objective = "max-energy";
  double opt_dz = 0.01, opt_head_margin = 0.0;
  bool opt_write_lp = false;
  std::string sim_schedule, sim_prices;
  double sim_substep = 60.0;
  std::string lp_prices = "flat:1", lp_objective = "max-energy";
  std::string chk_schedule, chk_prices = "flat:0";
  double chk_tol = 1e-6;

  CLI::App* optimize = app.add_subcommand(
      "optimize", "compute the optimal schedule and write the outputs");
  detail::add_common(optimize, opt_common);
  optimize->add_option("--prices", opt_prices,
                       "price CSV or flat:<value> (default flat:1)");
  optimize->add_option("--objective", opt_objective,
                       "max-energy | max-revenue (default max-energy)");
  optimize->add_option("--dz", opt_dz,
                       "level grid resolution in m (default 0.01)");
  optimize->add_option("--head-margin", opt_head_margin,
                       "extra upper head-bound margin during the search, m");
  optimize->add_flag("--lp", opt_write_lp, "also export the MILP as model.lp");

  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "nonlinear replay of a schedule file");
  detail::add_common(simulate_cmd, sim_common);
  simulate_cmd->add_option("--schedule", sim_schedule, "schedule document")
      ->required();
  simulate_cmd->add_option("--substep", sim_substep,
                           "integration sub-step in s (default 60)");
  simulate_cmd->add_option("--prices", sim_prices,
                           "price CSV or flat:<value> for replay revenue");

  CLI::App* storage_cmd = app.add_subcommand(
      "storage", "storage profile of the lagoon over the tide window");
  detail::add_common(storage_cmd, sto_common);

  CLI::App* export_cmd =
      app.add_subcommand("export-lp", "write the MILP in LP text format");
  detail::add_common(export_cmd, lp_common);
  export_cmd->add_option("--prices", lp_prices,
                         "price CSV or flat:<value> (default flat:1)");
  export_cmd->add_option("--objective", lp_objective,
                         "max-energy | max-revenue (default max-energy)");

  CLI::App* check_cmd = app.add_subcommand(
      "check", "feasibility report of a schedule file against the MILP");
  detail::add_common(check_cmd, chk_common);
  check_cmd->add_option("--schedule", chk_schedule, "schedule document")
      ->required();
  check_cmd->add_option("--prices", chk_prices,
                        "price CSV or flat:<value> (objective only)");
  check_cmd->add_option("--tol", chk_tol,
                        "absolute feasibility tolerance (default 1e-6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run '" << (argc > 0 ? argv[0] : "lagoon-cli")
              << " --help' for usage\n";
    return 1;
  }

  try {
    if (optimize->parsed()) {
      const LagoonConfig config = detail::resolve_config(opt_common);
      const TideSeries tide = detail::resolve_tide(opt_common, config);
      const PriceSeries prices = io::load_price_source(
          opt_prices, tide.t0, tide.dt_s, tide.steps());
      if (prices.prices.size() != tide.steps())
        throw std::invalid_argument("price series must cover every step");
      const Objective objective = detail::parse_objective(opt_objective);
      dp::DpParams params;
      params.level_resolution_m = opt_dz;
      params.head_margin_hi_m = opt_head_margin;
      const SolverResult result =
          dp::optimize(config, tide, prices, objective, params);
      const StorageProfile profile = storage_profile(config, tide);
      std::optional<milp::MilpModel> model;
      io::OutputTargets targets;
      targets.schedule_path = detail::out_path(opt_common, "schedule.txt");
      targets.series_path = detail::out_path(opt_common, "series.csv");
      targets.storage_path = detail::out_path(opt_common, "storage.csv");
      if (opt_write_lp) {
        model = milp::build_milp(config, tide, prices, objective);
        targets.lp_path = detail::out_path(opt_common, "model.lp");
      }
      io::write_outputs(config, tide, prices, result, opt_objective, &profile,
                        model ? &*model : nullptr, targets);
      const ScheduleTotals totals = summarize(config, result.schedule, prices);
      std::cout << "objective " << opt_objective << " value "
                << io::fmt(result.objective_value) << "\n"
                << "total_energy_mwh " << io::fmt(totals.energy_mwh) << "\n"
                << "total_revenue " << io::fmt(totals.revenue) << "\n"
                << "wrote " << targets.schedule_path << "\n";
      return 0;
    }
    if (simulate_cmd->parsed()) {
      const LagoonConfig config = detail::resolve_config(sim_common);
      const TideSeries tide = detail::resolve_tide(sim_common, config);
      const io::ScheduleDoc doc = io::read_schedule_doc(sim_schedule);
      if (doc.schedule.steps() != tide.steps())
        throw std::invalid_argument("schedule and tide horizons differ");
      if (doc.dt_s != config.dt_s)
        throw std::invalid_argument("schedule step length does not match config");
      const PriceSeries prices =
          sim_prices.empty()
              ? io::flat_prices(0.0, tide.t0, tide.dt_s, tide.steps())
              : io::load_price_source(sim_prices, tide.t0, tide.dt_s,
                                      tide.steps());
      const SimulatedTrajectory sim =
          simulate(config, tide, doc.schedule.modes, sim_substep,
                   sim_prices.empty() ? nullptr : &prices);
      const DeviationReport report = compare(doc.schedule, sim);

      Schedule as_schedule;
      as_schedule.modes = sim.modes;
      as_schedule.z_in_m = sim.z_in_m;
      as_schedule.head_m = sim.head_m;
      as_schedule.q_sluice_m3s = sim.q_sluice_m3s;
      as_schedule.q_turbine_fill_m3s = sim.q_turbine_fill_m3s;
      as_schedule.q_turbine_gen_m3s = sim.q_turbine_gen_m3s;
      as_schedule.q_total_m3s = sim.q_total_m3s;
      as_schedule.power_mw = sim.power_mw;
      as_schedule.energy_mwh = sim.energy_mwh;
      as_schedule.revenue = sim.revenue;
      const std::string replay_path = detail::out_path(sim_common, "replay.txt");
      io::write_schedule_doc(replay_path, config, tide, as_schedule, prices,
                             "replay");
      std::cout << "replay_total_energy_mwh "
                << io::fmt(summarize(config, as_schedule, prices).energy_mwh)
                << "\n"
                << "total_energy_dev_mwh "
                << io::fmt(report.total_energy_dev_mwh) << "\n"
                << "rel_total_energy_dev "
                << io::fmt(report.rel_total_energy_dev) << "\n"
                << "max_level_dev_m " << io::fmt(report.max_level_dev_m)
                << "\n"
                << "wrote " << replay_path << "\n";
      return 0;
    }
    if (storage_cmd->parsed()) {
      const LagoonConfig config = detail::resolve_config(sto_common);
      const TideSeries tide = detail::resolve_tide(sto_common, config);
      const StorageProfile profile = storage_profile(config, tide);
      const std::string path = detail::out_path(sto_common, "storage.csv");
      io::detail::write_file(path, io::render_storage_csv(tide, profile));
      std::cout << "wrote " << path << "\n";
      return 0;
    }
    if (export_cmd->parsed()) {
      const LagoonConfig config = detail::resolve_config(lp_common);
      const TideSeries tide = detail::resolve_tide(lp_common, config);
      const PriceSeries prices = io::load_price_source(
          lp_prices, tide.t0, tide.dt_s, tide.steps());
      const milp::MilpModel model = milp::build_milp(
          config, tide, prices, detail::parse_objective(lp_objective));
      const std::string path = detail::out_path(lp_common, "model.lp");
      io::detail::write_file(path, milp::export_lp(model));
      std::cout << "wrote " << path << " (" << model.variables.size()
                << " variables, " << model.constraints.size() << " rows)\n";
      return 0;
    }
    if (check_cmd->parsed()) {
      const LagoonConfig config = detail::resolve_config(chk_common);
      const TideSeries tide = detail::resolve_tide(chk_common, config);
      const io::ScheduleDoc doc = io::read_schedule_doc(chk_schedule);
      if (doc.schedule.steps() != tide.steps())
        throw std::invalid_argument("schedule and tide horizons differ");
      if (doc.dt_s != config.dt_s)
        throw std::invalid_argument("schedule step length does not match config");
      const PriceSeries prices = io::load_price_source(
          chk_prices, tide.t0, tide.dt_s, tide.steps());
      const milp::MilpModel model =
          milp::build_milp(config, tide, prices, Objective::MaxEnergy);
      const auto violations = milp::check_schedule(model, doc.schedule, chk_tol);
      if (violations.empty()) {
        std::cout << "feasible at tol " << io::fmt(chk_tol) << "\n";
        return 0;
      }
      std::cout << violations.size() << " violations at tol "
                << io::fmt(chk_tol) << "\n";
      for (const auto& v : violations)
        std::cout << v.row << " " << io::fmt(v.residual) << "\n";
      return 2;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lagoon::cli
