#include <doctest.h>

#include <cmath>
#include <random>

#include "rotorid/autopilot.hpp"
#include "rotorid/flighttest.hpp"
#include "rotorid/plant.hpp"

using namespace rotorid;

TEST_CASE("pid_step examples") {
  SUBCASE("proportional only") {
    PidGains g{2.0, 0.0, 0.0, -10.0, 10.0, 1.0};
    CHECK(pid_step(g, {}, 1.0, 0.0, 0.1).output == 2.0);
  }
  SUBCASE("zero error stays at zero") {
    PidGains g{1.0, 1.0, 1.0};
    PidState s;
    for (int k = 0; k < 50; ++k) {
      auto r = pid_step(g, s, 0.0, 0.0, 0.02);
      CHECK(r.output == 0.0);
      s = r.state;
    }
  }
  SUBCASE("integral of a unit error over one second") {
    PidGains g{0.0, 1.0, 0.0, -10.0, 10.0, 10.0};
    PidState s;
    double out = 0.0;
    for (int k = 0; k < 10; ++k) {
      auto r = pid_step(g, s, 1.0, 0.0, 0.1);
      out = r.output;
      s = r.state;
    }
    CHECK(std::abs(out - 1.0) < 1e-12);
  }
  SUBCASE("derivative acts on the measurement") {
    PidGains g{0.0, 0.0, 1.0, -10.0, 10.0, 1.0};
    auto r1 = pid_step(g, {}, 0.0, 0.0, 0.1);
    CHECK(r1.output == 0.0);
    auto r2 = pid_step(g, r1.state, 5.0, 0.2, 0.1);  // setpoint jump does not kick
    CHECK(r2.output == doctest::Approx(-2.0));
  }
}

TEST_CASE("integrator contribution stays inside its limit and freezes at saturation") {
  PidGains g{0.5, 2.0, 0.0, -1.0, 1.0, 0.3};
  PidState s;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    auto r = pid_step(g, s, n(rng), n(rng), 0.02);
    CHECK(std::abs(r.state.integrator * g.ki) <= g.integ_limit + 1e-12);
    CHECK(r.output <= 1.0);
    CHECK(r.output >= -1.0);
    s = r.state;
  }
  PidGains big{10.0, 1.0, 0.0, -1.0, 1.0, 5.0};
  auto r = pid_step(big, {}, 1.0, 0.0, 0.1);
  CHECK(r.state.integrator == 0.0);
}

TEST_CASE("controller outputs are bounded for any measurement") {
  HoverController c;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    FlightMeasurement m{n(rng), n(rng), n(rng), n(rng), n(rng), n(rng), n(rng), n(rng)};
    auto u = c.step(m, {}, AxisMask::all_closed_loop(), 0.02);
    for (Axis a : kAllAxes) {
      CHECK(u[a] <= 1.0);
      CHECK(u[a] >= -1.0);
    }
  }
}

TEST_CASE("level hover at the setpoint needs no control") {
  HoverController c;
  FlightMeasurement m{};
  m.h = 50.0;
  auto u = c.step(m, {}, AxisMask::all_closed_loop(), 0.02);
  for (Axis a : kAllAxes) CHECK(u[a] == 0.0);
}

TEST_CASE("external axis passes through, hold outputs the constant") {
  HoverController c;
  FlightMeasurement m{};
  m.h = 50.0;
  m.phi = 0.2;
  auto u = c.step(m, {}, AxisMask::all_closed_loop().external(Axis::Lateral, 0.3).hold(Axis::Collective, -0.25), 0.02);
  CHECK(u.lateral_cyclic == 0.3);
  CHECK(u.collective == -0.25);
}

TEST_CASE("roll error is opposed by lateral cyclic") {
  HoverController c;
  FlightMeasurement m{};
  m.h = 50.0;
  m.phi = 0.1;
  auto u = c.step(m, {}, AxisMask::all_closed_loop(), 0.02);
  CHECK(u.lateral_cyclic < 0.0);

  FlightTestSetup setup;
  RigidState x0 = RigidState::zero(setup.plant, setup.setpoint.h);
  x0.phi = 0.1;
  HoverTolerance tol;
  tol.attitude = 0.01;
  tol.altitude = 1e9;
  CHECK(hover_recovery_time(setup, x0, 30.0, tol) < 10.0);
}

TEST_CASE("external override leaves the other channels bit-identical") {
  HoverController all, over;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.3);
  for (Axis ext : kAllAxes) {
    all.reset();
    over.reset();
    for (int k = 0; k < 300; ++k) {
      FlightMeasurement m{n(rng), n(rng), n(rng), n(rng), n(rng), n(rng), n(rng), 50.0 + n(rng)};
      auto a = all.step(m, {}, AxisMask::all_closed_loop(), 0.02);
      auto b = over.step(m, {}, AxisMask::all_closed_loop().external(ext, n(rng)), 0.02);
      for (Axis ax : kAllAxes)
        if (ax != ext) CHECK(a[ax] == b[ax]);
    }
  }
}

TEST_CASE("reset clears every loop and is idempotent") {
  HoverController c;
  FlightMeasurement m{};
  m.h = 49.0;
  m.phi = 0.05;
  for (int k = 0; k < 100; ++k) c.step(m, {}, AxisMask::all_closed_loop(), 0.02);
  CHECK(c.outer_state(Axis::Lateral).integrator != 0.0);
  c.reset();
  c.reset();
  for (Axis a : kAllAxes) {
    CHECK(c.outer_state(a) == PidState{});
    CHECK(c.inner_state(a) == PidState{});
  }
  FlightMeasurement level{};
  level.h = 50.0;
  auto u = c.step(level, {}, AxisMask::all_closed_loop(), 0.02);
  for (Axis a : kAllAxes) CHECK(u[a] == 0.0);
}

TEST_CASE("default gains recover hover from anywhere inside the safety envelope") {
  for (auto lateral : {paper_lateral_model(), inband_lateral_model()}) {
    FlightTestSetup setup;
    setup.plant.lateral = lateral;
    CHECK(worst_recovery_time(setup) <= 20.0);
  }
}
