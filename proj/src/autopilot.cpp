#include "rotorid/autopilot.hpp"

#include <algorithm>
#include <cmath>

#include "rotorid/error.hpp"

namespace rotorid {

void PidGains::validate() const {
  if (!(out_min < out_max)) fail(ErrorKind::Config, "PID out_min must be < out_max");
  if (!(integ_limit >= 0.0)) fail(ErrorKind::Config, "PID integ_limit must be >= 0");
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd))
    fail(ErrorKind::Config, "PID gains must be finite");
}

PidResult pid_step(const PidGains& g, const PidState& s, double setpoint, double measurement, double dt) {
  const double e = setpoint - measurement;
  const double deriv = s.primed ? (measurement - s.prev_meas) / dt : 0.0;

  double integ = s.integrator + e * dt;
  if (g.ki != 0.0) {
    const double cap = g.integ_limit / std::abs(g.ki);
    integ = std::clamp(integ, -cap, cap);
  }
  double raw = g.kp * e + g.ki * integ - g.kd * deriv;
  if ((raw > g.out_max && e * g.ki > 0.0) || (raw < g.out_min && e * g.ki < 0.0)) {
    integ = s.integrator;
    raw = g.kp * e + g.ki * integ - g.kd * deriv;
  }
  return {std::clamp(raw, g.out_min, g.out_max), PidState{integ, measurement, true}};
}

AutopilotConfig AutopilotConfig::defaults() {
  AutopilotConfig c;
  c.roll.outer = {7.5, 0.37, 0.0, -1.0, 1.0, 0.5};
  c.roll.inner = {0.45, 1.5, 0.0, -1.0, 1.0, 0.5};
  c.pitch.outer = {7.5, 0.34, 0.0, -1.0, 1.0, 0.5};
  c.pitch.inner = {0.4, 0.75, 0.0, -1.0, 1.0, 0.5};
  c.yaw.outer = {1.0, 0.05, 0.0, -1.0, 1.0, 0.5};
  c.yaw.inner = {0.2, 0.2, 0.0, -1.0, 1.0, 0.5};
  c.altitude.outer = {2.7, 0.05, 0.0, -2.0, 2.0, 1.0};
  c.altitude.inner = {0.5, 1.12, 0.0, -1.0, 1.0, 0.5};
  return c;
}

CascadeGains& AutopilotConfig::loop(Axis axis) {
  switch (axis) {
    case Axis::Lateral: return roll;
    case Axis::Longitudinal: return pitch;
    case Axis::Pedal: return yaw;
    case Axis::Collective: break;
  }
  return altitude;
}

const CascadeGains& AutopilotConfig::loop(Axis axis) const {
  return const_cast<AutopilotConfig&>(*this).loop(axis);
}

void AutopilotConfig::validate() const {
  for (Axis a : kAllAxes) {
    loop(a).outer.validate();
    loop(a).inner.validate();
  }
}

AxisMask& AxisMask::external(Axis axis, double signal) {
  cmds_[static_cast<std::size_t>(axis)] = {AxisMode::External, signal};
  return *this;
}

AxisMask& AxisMask::hold(Axis axis, double value) {
  cmds_[static_cast<std::size_t>(axis)] = {AxisMode::Hold, value};
  return *this;
}

AxisMask& AxisMask::closed_loop(Axis axis) {
  cmds_[static_cast<std::size_t>(axis)] = {AxisMode::ClosedLoop, 0.0};
  return *this;
}

HoverController::HoverController(AutopilotConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void HoverController::reset() {
  outer_.fill(PidState{});
  inner_.fill(PidState{});
}

ControlVector HoverController::step(const FlightMeasurement& m, const HoverSetpoint& sp,
                                    const AxisMask& mask, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::Data, "controller dt must be positive");

  struct Loop {
    double attitude_set, attitude, rate;
  };
  // Altitude loop works in climb rate (-w) so both loops share sign conventions.
  const std::array<Loop, 4> loops = {{{sp.phi, m.phi, m.roll_rate},
                                      {sp.theta, m.theta, m.pitch_rate},
                                      {sp.psi, m.psi, m.yaw_rate},
                                      {sp.h, m.h, -m.heave_rate}}};
  ControlVector out;
  for (Axis a : kAllAxes) {
    const auto i = static_cast<std::size_t>(a);
    const AxisCommand& cmd = mask[a];
    if (cmd.mode != AxisMode::ClosedLoop) {
      outer_[i] = PidState{};
      inner_[i] = PidState{};
      out[a] = cmd.value;
      continue;
    }
    const CascadeGains& g = cfg_.loop(a);
    const PidResult o = pid_step(g.outer, outer_[i], loops[i].attitude_set, loops[i].attitude, dt);
    const PidResult n = pid_step(g.inner, inner_[i], o.output, loops[i].rate, dt);
    outer_[i] = o.state;
    inner_[i] = n.state;
    out[a] = n.output;
  }
  return out.clamped();
}

}  // namespace rotorid
