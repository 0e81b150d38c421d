#pragma once

#include <array>

#include "rotorid/controls.hpp"

namespace rotorid {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double out_min = -1.0;
  double out_max = 1.0;
  /// Cap on |ki * integrator|.
  double integ_limit = 1.0;

  void validate() const;
};

struct PidState {
  double integrator = 0.0;
  double prev_meas = 0.0;
  bool primed = false;  // prev_meas valid; first step has no derivative term

  friend bool operator==(const PidState&, const PidState&) = default;
};

struct PidResult {
  double output;
  PidState state;
};

/// Parallel PID with derivative on measurement and conditional anti-windup:
/// the integrator is frozen whenever the unclamped output is saturated in the
/// direction the error would push it.
PidResult pid_step(const PidGains& gains, const PidState& state, double setpoint, double measurement,
                   double dt);

/// Outer loop produces a rate command, inner loop turns it into a deflection.
struct CascadeGains {
  PidGains outer;
  PidGains inner;
};

/// Hover autopilot gains. Defaults come from scripted tuning against both the
/// flight-identified lateral block and the in-band test plant.
struct AutopilotConfig {
  CascadeGains roll;      // phi -> P command -> lateral cyclic
  CascadeGains pitch;     // theta -> q command -> longitudinal cyclic
  CascadeGains yaw;       // psi -> R command -> pedal
  CascadeGains altitude;  // h -> climb-rate command -> collective

  static AutopilotConfig defaults();
  CascadeGains& loop(Axis axis);
  const CascadeGains& loop(Axis axis) const;
  void validate() const;
};

struct HoverSetpoint {
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  double h = 50.0;
};

enum class AxisMode { ClosedLoop, External, Hold };

struct AxisCommand {
  AxisMode mode = AxisMode::ClosedLoop;
  double value = 0.0;  // External: current signal sample. Hold: the constant.
};

/// One mode per control channel.
class AxisMask {
 public:
  static AxisMask all_closed_loop() { return AxisMask{}; }
  AxisMask& external(Axis axis, double signal);
  AxisMask& hold(Axis axis, double value);
  AxisMask& closed_loop(Axis axis);
  const AxisCommand& operator[](Axis axis) const { return cmds_[static_cast<std::size_t>(axis)]; }

 private:
  std::array<AxisCommand, 4> cmds_{};
};

class HoverController {
 public:
  explicit HoverController(AutopilotConfig cfg = AutopilotConfig::defaults());

  /// ClosedLoop channels run the cascade; External passes the signal through
  /// (trim is zero in perturbation coordinates); Hold outputs the constant.
  /// Loops on channels not in ClosedLoop are held reset so hand-back starts clean.
  ControlVector step(const FlightMeasurement& meas, const HoverSetpoint& setpoint, const AxisMask& mask,
                     double dt);

  void reset();

  const AutopilotConfig& config() const { return cfg_; }
  const PidState& outer_state(Axis axis) const { return outer_[static_cast<std::size_t>(axis)]; }
  const PidState& inner_state(Axis axis) const { return inner_[static_cast<std::size_t>(axis)]; }

 private:
  AutopilotConfig cfg_;
  std::array<PidState, 4> outer_{};
  std::array<PidState, 4> inner_{};
};

}  // namespace rotorid
