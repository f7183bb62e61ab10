#include <catch2/catch.hpp>

#include "lagoon/storage.hpp"
#include "scenario.hpp"

using namespace lagoon;

TEST_CASE("storage profile basics") {
  const LagoonConfig c = swansea_config();
  // z_max is 4; heads at full basin run 0, 7, 3, 0.5, 4.
  TideSeries tide{0, 1800.0, {4.0, -3.0, 1.0, 3.5, 0.0, 1.0}};
  const StorageProfile p = storage_profile(c, tide);
  REQUIRE(p.stored_energy_mwh.size() == 5);
  CHECK(p.z_max_m == 4.0);

  CHECK(p.head_m[0] == 0.0);
  CHECK(p.stored_energy_mwh[0] == 0.0);  // basin equals sea

  CHECK(p.head_m[1] == 7.0);
  CHECK(p.stored_energy_mwh[1] == Approx(160.0));  // 16 x 20 MW x 0.5 h

  CHECK(p.head_m[3] == 0.5);
  CHECK(p.stored_energy_mwh[3] == 0.0);  // below the 1 m startup head
}

TEST_CASE("stored energy is zero below the startup head, capped at the fleet") {
  const LagoonConfig c = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const StorageProfile p = storage_profile(c, tide);
  const double cap = c.n_turbines * c.turbine_capacity_mw * c.dt_s / 3600.0;
  for (std::size_t t = 0; t < p.stored_energy_mwh.size(); ++t) {
    CHECK(p.stored_energy_mwh[t] >= 0.0);
    CHECK(p.stored_energy_mwh[t] <= cap + 1e-12);
    if (p.head_m[t] < c.h_min_m) CHECK(p.stored_energy_mwh[t] == 0.0);
    if (p.stored_energy_mwh[t] == 0.0) CHECK(p.head_m[t] < c.h_min_m);
  }
}

TEST_CASE("stored energy is non-decreasing in the full-basin head") {
  const LagoonConfig c = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  const StorageProfile p = storage_profile(c, tide);
  for (std::size_t a = 0; a < p.head_m.size(); ++a)
    for (std::size_t b = 0; b < p.head_m.size(); ++b)
      if (p.head_m[a] <= p.head_m[b])
        CHECK(p.stored_energy_mwh[a] <= p.stored_energy_mwh[b] + 1e-12);
}

TEST_CASE("storage profile ignores a constant datum shift") {
  const LagoonConfig c = swansea_config();
  const TideSeries tide = scenario::swansea_tide();
  TideSeries shifted = tide;
  for (double& z : shifted.levels_m) z += 3.25;
  const StorageProfile a = storage_profile(c, tide);
  const StorageProfile b = storage_profile(c, shifted);
  for (std::size_t t = 0; t < a.stored_energy_mwh.size(); ++t) {
    CHECK(b.head_m[t] == Approx(a.head_m[t]).margin(1e-9));
    CHECK(b.stored_energy_mwh[t] ==
          Approx(a.stored_energy_mwh[t]).margin(1e-9));
  }
}

TEST_CASE("heads past the chart domain are clamped before the power lookup") {
  LagoonConfig c = swansea_config();
  // A 10 m swing: full-basin head reaches 10, beyond the chart's 8 m edge.
  TideSeries tide{0, 1800.0, {5.0, -5.0, 5.0}};
  const StorageProfile p = storage_profile(c, tide);
  CHECK(p.head_m[1] == 10.0);
  CHECK(p.stored_energy_mwh[1] == Approx(160.0));
}

TEST_CASE("summarize totals a schedule") {
  const LagoonConfig c = swansea_config();

  SECTION("an idle schedule sums to zero") {
    Schedule s;
    s.modes.assign(4, Mode::hold());
    s.energy_mwh.assign(4, 0.0);
    const PriceSeries prices{0, 1800.0, {10, 20, 30, 40}};
    const ScheduleTotals t = summarize(c, s, prices);
    CHECK(t.energy_mwh == 0.0);
    CHECK(t.revenue == 0.0);
    CHECK(t.capacity_factor == 0.0);
  }

  SECTION("one full-power step") {
    Schedule s;
    s.modes = {Mode::generate(16)};
    s.energy_mwh = {160.0};
    const PriceSeries prices{0, 1800.0, {100.0}};
    const ScheduleTotals t = summarize(c, s, prices);
    CHECK(t.energy_mwh == 160.0);
    CHECK(t.revenue == 16000.0);
    CHECK(t.capacity_factor == Approx(1.0));  // 160 MWh over 320 MW x 0.5 h
  }

  SECTION("length mismatch is an error") {
    Schedule s;
    s.modes = {Mode::hold()};
    s.energy_mwh = {0.0};
    const PriceSeries prices{0, 1800.0, {1.0, 2.0}};
    CHECK_THROWS_AS(summarize(c, s, prices), std::invalid_argument);
  }
}
