#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rotorid/error.hpp"
#include "rotorid/time_history.hpp"

using namespace rotorid;

namespace {

TimeHistory read(const std::string& text) {
  std::istringstream in(text);
  return read_time_history(in);
}

std::string error_of(const std::string& text) {
  try {
    read(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("write then read is bit-exact") {
  TimeHistory h(0.02, 1.0);
  h.add("aileron", "nd", {0.1, -1.0 / 3.0, 1e-300, 5e17});
  h.add("P", "rad/s", {0.0, -0.0, 3.141592653589793, 2.2250738585072014e-308});
  std::ostringstream out;
  write_time_history(h, out);
  CHECK(read(out.str()) == h);
}

TEST_CASE("handwritten two-sample fixture") {
  auto h = read("# dt=0.5\n# channels: t(s) u(nd) y(m)\n0 1.5 -2\n0.5 2.5 4e-3\n");
  CHECK(h.dt() == 0.5);
  CHECK(h.size() == 2);
  CHECK(h["u"][1] == 2.5);
  CHECK(h["y"][1] == 0.004);
  CHECK(h.channels()[1].unit == "m");
}

TEST_CASE("parse errors name the line") {
  CHECK(error_of("# dt=0.5\n# channels: t(s)\n0\n").find("line 2") != std::string::npos);
  CHECK(error_of("# dt=0.5\n# channels: t(s) u(nd)\n0 1\n0.5\n").find("line 4") != std::string::npos);
  CHECK(error_of("# dt=0.5\n# channels: t(s) u(nd)\n0 1\n0.4 1\n").find("line 4") != std::string::npos);
  CHECK(error_of("# dt=0.5\n# channels: t(s) u(nd)\n0.5 1\n0 1\n").find("line 4") != std::string::npos);
  CHECK(error_of("dt=0.5\n").find("line 1") != std::string::npos);
  CHECK(error_of("# dt=0.5\n# channels: t(s) u(nd)\n0 x\n").find("line 3") != std::string::npos);
}

TEST_CASE("channel rules") {
  TimeHistory h(0.1);
  h.add("a", "nd", {1, 2, 3});
  CHECK_THROWS_AS(h.add("a", "nd", {1, 2, 3}), Error);
  CHECK_THROWS_AS(h.add("b", "nd", {1, 2}), Error);
  CHECK_THROWS_AS(h.add("c", "nd", {1, std::nan(""), 3}), Error);
  CHECK_THROWS_AS(h["missing"], Error);
  auto s = h.slice(1, 3);
  CHECK(s.size() == 2);
  CHECK(s.t0() == doctest::Approx(0.1));
  CHECK(s["a"][0] == 2);
}
