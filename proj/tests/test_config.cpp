#include <doctest.h>

#include "rotorid/config.hpp"
#include "rotorid/error.hpp"

using namespace rotorid;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("empty config is all defaults") {
  auto c = parse_config("");
  CHECK(serialize_config(c) == serialize_config(PipelineConfig{}));
  CHECK(c.sweep.schedule.omega_min == 0.3);
  CHECK(c.ssid.options.multistart == 8);
  CHECK(parse_config("# only a comment\n\n").seed == 1);
}

TEST_CASE("values, comments and overrides") {
  auto c = parse_config(
      "run.seed = 77   # trailing comment\n"
      "plant.lateral_preset = paper\n"
      "sweep.axes = lateral longitudinal\n"
      "sweep.pedal.amplitude = 0.05\n"
      "ssid.initial = F11=-3 G11=7\n"
      "autopilot.roll_outer_kp = 6\n");
  CHECK(c.seed == 77);
  CHECK(c.plant.lateral_preset == "paper");
  CHECK(c.sweep.axes == std::vector<Axis>{Axis::Lateral, Axis::Longitudinal});
  CHECK(c.sweep.for_axis(Axis::Pedal).amplitude == 0.05);
  CHECK(c.sweep.for_axis(Axis::Lateral).amplitude == 0.1);
  CHECK(c.ssid.initial.at("F11") == -3.0);
  CHECK(c.autopilot.roll.outer.kp == 6.0);
}

TEST_CASE("serialize then parse is stable") {
  auto c = parse_config(
      "plant.lateral_F = -5 0 3; 0 -2.5 0; 0.4 0 -1\n"
      "sweep.C2 = 0.02\n"
      "sweep.lateral.T_rec = 60\n"
      "composite.window_lengths = 30 15 7.5\n"
      "ssid.free = F11 G11\n"
      "ssid.W_p = 0.02\n"
      "run.case = bench\n");
  const auto once = serialize_config(c);
  CHECK(serialize_config(parse_config(once)) == once);
  CHECK(serialize_config(parse_config(serialize_config(PipelineConfig{}))) == serialize_config(PipelineConfig{}));
}

TEST_CASE("invariants are enforced with a location") {
  CHECK(error_of("sweep.omega_max = 0.1\n").find("line 1") != std::string::npos);
  CHECK(error_of("\n\nsafety.h_min = 90\n").find("line 3") != std::string::npos);
  error_of("composite.min_coherence = 1.5\n");
  error_of("ssid.multistart = 0\n");
}

TEST_CASE("unknown keys, type errors and duplicates are rejected") {
  CHECK(error_of("sweep.omega_mid = 1\n").find("line 1") != std::string::npos);
  CHECK(error_of("run.seed = 1\nrun.seed = x\n").find("line 2") != std::string::npos);
  CHECK(error_of("run.seed = 1\nrun.seed = 2\n").find("line 2") != std::string::npos);
  error_of("no equals sign here\n");
  error_of("plant.lateral_preset = wobble\n");
  error_of("plant.lateral_F = 1 2; 3\n");
  error_of("sweep.axes = sideways\n");
  error_of("spectral.zoh_input = maybe\n");
}

TEST_CASE("matrix text form") {
  Matrix m(2, 2);
  m << 1.5, -2, 0, 1e-3;
  CHECK(parse_matrix(format_matrix(m)) == m);
  CHECK_THROWS_AS(parse_matrix("1 2; 3"), Error);
}

TEST_CASE("derived objects") {
  auto c = parse_config("plant.lateral_preset = paper\n");
  CHECK(c.lateral_model().F() == paper_lateral_model().F());
  CHECK(c.model_structure().n_free() == 8);
  CHECK(c.spectral_config(20.0).window_length == 20.0);
  CHECK(c.composite.min_cycles == 4.0);
}
