#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace rotorid {

/// The four rotorcraft control channels.
enum class Axis : std::size_t { Lateral = 0, Longitudinal = 1, Pedal = 2, Collective = 3 };

inline constexpr std::array<Axis, 4> kAllAxes = {Axis::Lateral, Axis::Longitudinal, Axis::Pedal,
                                                 Axis::Collective};

/// Name used on the command line and in file names ("lateral", ...).
std::string_view axis_name(Axis axis);
/// Name of the logged control channel driving the plant ("aileron", ...).
std::string_view control_channel(Axis axis);
std::optional<Axis> parse_axis(std::string_view name);

/// Normalized control deflections, each in [-1, 1].
struct ControlVector {
  double lateral_cyclic = 0.0;
  double longitudinal_cyclic = 0.0;
  double pedal = 0.0;
  double collective = 0.0;

  double& operator[](Axis a);
  double operator[](Axis a) const;
  ControlVector clamped() const;

  friend bool operator==(const ControlVector&, const ControlVector&) = default;
};

/// What the autopilot and the safety supervisor see at each sample.
struct FlightMeasurement {
  double roll_rate = 0.0;   // P, rad/s
  double pitch_rate = 0.0;  // q, rad/s
  double yaw_rate = 0.0;    // R, rad/s
  double heave_rate = 0.0;  // w, m/s, positive down
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  double h = 0.0;  // m
};

}  // namespace rotorid
