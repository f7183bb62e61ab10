// Acceptance suite: every release-gating property of the scheduler, one
// test case per criterion, each printing a single PASS/FAIL line. Run via
// ctest or directly: ./acceptance_tests

#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lagoon/cli.hpp"
#include "lagoon/dp.hpp"
#include "lagoon/io.hpp"
#include "lagoon/milp.hpp"
#include "lagoon/physics.hpp"
#include "lagoon/sim.hpp"
#include "lagoon/storage.hpp"
#include "scenario.hpp"

using namespace lagoon;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  Criterion(int number, const char* name) : number(number), name(name) {}

  int number;
  const char* name;
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }

  ~Criterion() {
    std::printf("ACCEPTANCE %d %s: %s\n", number, name,
                ok ? "PASS" : "FAIL");
    for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
    std::fflush(stdout);
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"lagoon-cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("criterion 1: hill-chart fidelity") {
  Criterion c{1, "hill-chart fidelity"};
  const double tol = 1e-9;
  c.expect(near(turbine_gen_flow(0.5), 0.0, tol), "flow at 0.5 m");
  c.expect(near(turbine_gen_flow(1.0), 170.59, tol), "flow at 1 m");
  c.expect(near(turbine_gen_flow(2.0), 248.19, tol), "flow at 2 m");
  c.expect(near(turbine_gen_flow(3.9), 395.359, tol), "flow at 3.9 m");
  c.expect(near(turbine_gen_flow(5.0), 411.65, tol), "flow at 5 m");
  c.expect(near(turbine_gen_flow(7.0), 437.38, tol), "flow at 7 m");
  c.expect(near(turbine_gen_flow(8.0), 384.55, tol), "flow at 8 m");
  c.expect(near(turbine_power(0.5), 0.0, tol), "power at 0.5 m");
  c.expect(near(turbine_power(1.0), 0.0, tol), "power at 1 m");
  c.expect(near(turbine_power(2.0), 3.33, tol), "power at 2 m");
  c.expect(near(turbine_power(4.0), 9.99, tol), "power at 4 m");
  c.expect(near(turbine_power(7.0), 20.0, tol), "power at 7 m");
  c.expect(near(turbine_power(8.0), 20.0, tol), "power at 8 m");
  REQUIRE(c.ok);
}

TEST_CASE("criterion 2: oracle equivalence on randomized tiny instances") {
  Criterion c{2, "oracle equivalence"};
  std::mt19937 rng(7031);
  std::uniform_real_distribution<double> dz(-0.5, 0.5);
  std::uniform_real_distribution<double> dprice(0.0, 100.0);
  std::uniform_int_distribution<int> dT(3, 6);
  std::uniform_int_distribution<int> dn(1, 2);

  dp::DpParams params;
  params.level_resolution_m = 0.05;

  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    LagoonConfig config = swansea_config();
    config.surface_area_m2 = 2.0e5;
    config.n_turbines = dn(rng);
    config.n_sluices = 1;
    config.sluice_area_m2 = 50.0;
    config.turbine_flow_area_m2 = 20.0;
    const int T = dT(rng);
    TideSeries tide{0, 1800.0, {0.0}};
    for (int t = 0; t < T; ++t)
      tide.levels_m.push_back(tide.levels_m.back() + dz(rng));
    PriceSeries prices{0, 1800.0, {}};
    for (int t = 0; t < T; ++t) prices.prices.push_back(dprice(rng));
    const Objective objective =
        trial % 2 == 0 ? Objective::MaxEnergy : Objective::MaxRevenue;

    bool fast_infeasible = false, oracle_infeasible = false;
    SolverResult fast, oracle;
    try {
      fast = dp::optimize(config, tide, prices, objective, params);
    } catch (const InfeasibleError&) {
      fast_infeasible = true;
    }
    try {
      oracle =
          dp::enumerate_exhaustive(config, tide, prices, objective, params);
    } catch (const InfeasibleError&) {
      oracle_infeasible = true;
    }
    c.expect(fast_infeasible == oracle_infeasible,
             "feasibility disagreement on trial " + std::to_string(trial));
    if (fast_infeasible || oracle_infeasible) continue;
    ++compared;
    c.expect(fast.objective_value == oracle.objective_value,
             "objective mismatch on trial " + std::to_string(trial));
  }
  c.expect(compared >= 15, "too few feasible comparisons");
  REQUIRE(c.ok);
}

TEST_CASE("criterion 3: revenue dominance on the Swansea-scale scenario") {
  Criterion c{3, "revenue/energy dominance"};
  const LagoonConfig config = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const PriceSeries prices = scenario::swansea_prices();
  const auto params = scenario::swansea_params();

  // Peak/off-peak spread of the profile must be at least 30%.
  double p_lo = prices.prices[0], p_hi = prices.prices[0];
  for (double p : prices.prices) {
    p_lo = std::min(p_lo, p);
    p_hi = std::max(p_hi, p);
  }
  c.expect((p_hi - p_lo) / p_lo >= 0.30, "price spread below 30%");

  const auto me =
      dp::optimize(config, tide, prices, Objective::MaxEnergy, params);
  const auto mr =
      dp::optimize(config, tide, prices, Objective::MaxRevenue, params);
  const double rev_me =
      evaluate_objective(me.schedule, prices, Objective::MaxRevenue);
  const double en_mr =
      evaluate_objective(mr.schedule, prices, Objective::MaxEnergy);

  c.expect(mr.objective_value >= rev_me, "revenue dominance violated");
  c.expect(me.objective_value >= en_mr, "energy dominance violated");
  // The price peak is placed ahead of the energy-optimal generation window,
  // so chasing revenue must strictly beat the energy-optimal schedule.
  c.expect(mr.objective_value > rev_me, "revenue not strictly greater");
  REQUIRE(c.ok);
}

TEST_CASE("criterion 4: constant prices scale the optimum exactly") {
  Criterion c{4, "constant-price equivalence"};
  const LagoonConfig config = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const auto params = scenario::swansea_params();
  const std::size_t T = tide.steps();

  for (double price : {1.0, 64.0}) {
    const PriceSeries flat = io::flat_prices(price, 0, 1800.0, T);
    const auto me =
        dp::optimize(config, tide, flat, Objective::MaxEnergy, params);
    const auto mr =
        dp::optimize(config, tide, flat, Objective::MaxRevenue, params);
    const double expected = price * me.objective_value;
    c.expect(std::abs(mr.objective_value - expected) <=
                 1e-9 * std::abs(expected),
             "flat:" + io::fmt(price) + " objective ratio off");
  }
  REQUIRE(c.ok);
}

TEST_CASE("criterion 5: daily energy magnitude on the Swansea-scale scenario") {
  Criterion c{5, "scenario energy magnitude"};
  const LagoonConfig config = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const PriceSeries prices = scenario::swansea_prices();
  const auto me = dp::optimize(config, tide, prices, Objective::MaxEnergy,
                               scenario::swansea_params());
  c.expect(me.objective_value >= 250.0 && me.objective_value <= 750.0,
           "daily energy " + io::fmt(me.objective_value) +
               " MWh outside [250, 750]");
  REQUIRE(c.ok);
}

TEST_CASE("criterion 6: MILP consistency") {
  Criterion c{6, "MILP consistency"};
  const LagoonConfig config = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const PriceSeries prices = scenario::swansea_prices();

  // Every optimizer schedule is feasible for the MILP at 1e-6.
  for (Objective objective : {Objective::MaxEnergy, Objective::MaxRevenue}) {
    const auto result = dp::optimize(config, tide, prices, objective,
                                     scenario::swansea_params());
    const auto model = milp::build_milp(config, tide, prices, objective);
    const auto violations = milp::check_schedule(model, result.schedule, 1e-6);
    c.expect(violations.empty(),
             std::string(to_string(objective)) + " schedule violates " +
                 std::to_string(violations.size()) + " rows");
  }

  // The segment encoding reproduces the chart on a 1e-2 head grid.
  {
    LagoonConfig one = config;
    one.n_turbines = 1;
    const TideSeries toy{0, 1800.0, {0.0, 0.0}};
    const PriceSeries toy_prices{0, 1800.0, {1.0}};
    const auto model =
        milp::build_milp(one, toy, toy_prices, Objective::MaxEnergy);
    const auto segments = milp::detail::hill_segments(one);
    std::vector<double> x(model.variables.size(), 0.0);
    auto set = [&](const std::string& name, double v) {
      x[static_cast<std::size_t>(model.index(name))] = v;
    };
    bool all_ok = true;
    for (int i = 0; i <= 800; ++i) {
      const double h = static_cast<double>(i) * 0.01;
      const int seg = milp::detail::segment_of(segments, h);
      set("H_0", h);
      for (int k = 0; k < 4; ++k)
        set("seg_" + std::to_string(k) + "_0_0", k == seg ? 1.0 : 0.0);
      set("QTG_0_0", turbine_gen_flow(h));
      set("PT_0_0", turbine_power(h));
      for (const auto& v : milp::check_assignment(model, x, 1e-6))
        if (v.row.rfind("seg", 0) == 0) all_ok = false;
    }
    c.expect(all_ok, "segment encoding deviates from the chart");
  }

  // The gating rows force z = delta * Q for delta in {0, 1}: the exact
  // product satisfies every row, any deviation violates one.
  {
    LagoonConfig one = config;
    one.n_turbines = 1;
    const TideSeries toy{0, 1800.0, {0.0, 0.0}};
    const PriceSeries toy_prices{0, 1800.0, {1.0}};
    const auto model =
        milp::build_milp(one, toy, toy_prices, Objective::MaxEnergy);
    std::vector<double> x(model.variables.size(), 0.0);
    auto set = [&](const std::string& name, double v) {
      x[static_cast<std::size_t>(model.index(name))] = v;
    };
    auto gating_violated = [&]() {
      for (const auto& v : milp::check_assignment(model, x, 1e-9))
        if (v.row.rfind("genprod", 0) == 0) return true;
      return false;
    };
    bool all_ok = true;
    for (int delta : {0, 1}) {
      for (double q = 0.0; q <= milp::kGenFlowBound; q += 11.25) {
        set("dG_0_0", delta);
        set("QTG_0_0", q);
        set("zTG_0_0", delta * q);
        if (gating_violated()) all_ok = false;
        if (delta * q + 0.01 <= milp::kGenFlowBound) {
          set("zTG_0_0", delta * q + 0.01);
          if (!gating_violated()) all_ok = false;
        }
        if (delta * q - 0.01 >= 0.0) {
          set("zTG_0_0", delta * q - 0.01);
          if (!gating_violated()) all_ok = false;
        }
      }
    }
    c.expect(all_ok, "gating rows do not force z = delta*Q");
  }
  REQUIRE(c.ok);
}

TEST_CASE("criterion 7: linearization gap under nonlinear replay") {
  Criterion c{7, "linearization gap"};
  const LagoonConfig config = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const PriceSeries prices = scenario::swansea_prices();
  const auto me = dp::optimize(config, tide, prices, Objective::MaxEnergy,
                               scenario::swansea_params());

  const auto replay = simulate(config, tide, me.schedule.modes, 60.0, &prices);
  const DeviationReport report = compare(me.schedule, replay);
  c.expect(report.rel_total_energy_dev <= 0.15,
           "total energy deviation " + io::fmt(report.rel_total_energy_dev) +
               " above 15%");

  const auto fine = simulate(config, tide, me.schedule.modes, 30.0, &prices);
  double e60 = 0.0, e30 = 0.0;
  for (double e : replay.energy_mwh) e60 += e;
  for (double e : fine.energy_mwh) e30 += e;
  c.expect(std::abs(e60 - e30) < 0.005 * e30,
           "sub-step halving moved energy by " +
               io::fmt(std::abs(e60 - e30) / e30));
  REQUIRE(c.ok);
}

TEST_CASE("criterion 8: storage profile properties") {
  Criterion c{8, "storage profile"};
  const LagoonConfig config = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const StorageProfile profile = storage_profile(config, tide);
  const double cap =
      config.n_turbines * config.turbine_capacity_mw * config.dt_s / 3600.0;

  bool zero_below_start = true, capped = true, monotone = true;
  for (std::size_t t = 0; t < profile.stored_energy_mwh.size(); ++t) {
    if (profile.head_m[t] < 1.0 && profile.stored_energy_mwh[t] != 0.0)
      zero_below_start = false;
    if (profile.stored_energy_mwh[t] > cap + 1e-12) capped = false;
    for (std::size_t u = 0; u < profile.stored_energy_mwh.size(); ++u)
      if (profile.head_m[t] <= profile.head_m[u] &&
          profile.stored_energy_mwh[t] > profile.stored_energy_mwh[u] + 1e-12)
        monotone = false;
  }
  c.expect(zero_below_start, "stored energy nonzero below the startup head");
  c.expect(capped, "stored energy above the 160 MWh fleet cap");
  c.expect(monotone, "stored energy not monotone in the full-basin head");
  c.expect(near(cap, 160.0, 1e-12), "fleet cap is not 160 MWh per step");

  TideSeries shifted = tide;
  for (double& z : shifted.levels_m) z += 2.75;
  const StorageProfile offset = storage_profile(config, shifted);
  bool invariant = true;
  for (std::size_t t = 0; t < profile.stored_energy_mwh.size(); ++t)
    if (!near(profile.stored_energy_mwh[t], offset.stored_energy_mwh[t],
              1e-9))
      invariant = false;
  c.expect(invariant, "profile changed under a constant tide offset");
  REQUIRE(c.ok);
}

TEST_CASE("criterion 9: determinism and round-trip") {
  Criterion c{9, "determinism and round-trip"};
  const fs::path dir_a = fs::temp_directory_path() / "lagoon_accept_a";
  const fs::path dir_b = fs::temp_directory_path() / "lagoon_accept_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  for (const fs::path& dir : {dir_a, dir_b}) {
    const int rc =
        run_cli({"optimize", "--synth-tide", "0,4,44700,3.455751918948773",
                 "--prices", "flat:50", "--objective", "max-revenue",
                 "--head-margin", "0.25", "--out-dir", dir.string(), "--lp"});
    c.expect(rc == 0, "optimize run failed");
  }
  for (const char* name : {"schedule.txt", "series.csv", "storage.csv",
                           "model.lp"}) {
    c.expect(read_bytes(dir_a / name) == read_bytes(dir_b / name),
             std::string(name) + " differs between identical runs");
  }

  // Round-trip: the written schedule re-parses to the written values.
  const io::ScheduleDoc doc =
      io::read_schedule_doc((dir_a / "schedule.txt").string());
  const LagoonConfig config = swansea_config();
  const TideSeries tide = io::synth_tide(0.0, 4.0, 44700.0,
                                         3.455751918948773, 0, 1800.0, 48);
  const PriceSeries prices = io::flat_prices(50.0, 0, 1800.0, 48);
  const auto result = dp::optimize(config, tide, prices, Objective::MaxRevenue,
                                   scenario::swansea_params());
  bool round_trip = doc.schedule.steps() == result.schedule.steps();
  if (round_trip) {
    for (std::size_t t = 0; t < result.schedule.steps(); ++t) {
      if (doc.schedule.modes[t] != result.schedule.modes[t])
        round_trip = false;
      if (!near(doc.schedule.z_in_m[t], result.schedule.z_in_m[t],
                1e-9 * std::max(1.0, std::abs(result.schedule.z_in_m[t]))))
        round_trip = false;
      if (!near(doc.schedule.energy_mwh[t], result.schedule.energy_mwh[t],
                1e-9 * std::max(1.0, result.schedule.energy_mwh[t])))
        round_trip = false;
    }
  }
  c.expect(round_trip, "schedule document did not round-trip");
  REQUIRE(c.ok);
}
