#include "rotorid/flighttest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rotorid/error.hpp"

namespace rotorid {

double SweepSchedule::c2() const { return C2 ? *C2 : 1.0 / std::expm1(C1); }

void SweepSchedule::validate() const {
  if (!(omega_min > 0.0 && omega_min < omega_max))
    fail(ErrorKind::Config, "sweep requires 0 < omega_min < omega_max");
  if (!(T_rec > 0.0)) fail(ErrorKind::Config, "sweep T_rec must be positive");
  if (!(C1 > 0.0)) fail(ErrorKind::Config, "sweep C1 must be positive");
  if (C2 && !(*C2 > 0.0)) fail(ErrorKind::Config, "sweep C2 must be positive");
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) fail(ErrorKind::Config, "sweep amplitude must lie in [0, 1]");
  if (!(noise_fraction >= 0.0 && noise_fraction < 1.0))
    fail(ErrorKind::Config, "sweep noise_fraction must lie in [0, 1)");
  if (!(t_trim_pre >= 0.0 && t_trim_post >= 0.0)) fail(ErrorKind::Config, "trim pads must be >= 0");
  if (!(fade_time >= 0.0 && 2.0 * fade_time <= T_rec))
    fail(ErrorKind::Config, "sweep fade_time must be >= 0 and at most T_rec / 2");
}

namespace {

void check_sweep_time(double t, const SweepSchedule& s) {
  if (!(t >= 0.0 && t <= s.T_rec))
    fail(ErrorKind::Data, "sweep time " + format_double(t) + " outside [0, " + format_double(s.T_rec) + "]");
}

}  // namespace

double sweep_frequency(double t, const SweepSchedule& s) {
  check_sweep_time(t, s);
  const double K = s.c2() * std::expm1(s.C1 * t / s.T_rec);
  return s.omega_min + K * (s.omega_max - s.omega_min);
}

double sweep_phase(double t, const SweepSchedule& s) {
  check_sweep_time(t, s);
  const double ramp = (s.T_rec / s.C1) * std::expm1(s.C1 * t / s.T_rec) - t;
  return s.omega_min * t + (s.omega_max - s.omega_min) * s.c2() * ramp;
}

double sweep_signal(double t, const SweepSchedule& s, WhiteNoise& noise) {
  const double theta = sweep_phase(t, s);
  double fade = 1.0;
  if (s.fade_time > 0.0) fade = std::clamp(std::min(t, s.T_rec - t) / s.fade_time, 0.0, 1.0);
  const double n = noise.next();
  return fade * s.amplitude * std::sin(theta) + s.noise_fraction * s.amplitude * n;
}

std::vector<double> sweep_samples(const SweepSchedule& s, double dt, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(std::lround(s.T_rec / dt));
  WhiteNoise noise(seed);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = sweep_signal(static_cast<double>(k) * dt, s, noise);
  return out;
}

void DoubletSpec::validate() const {
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) fail(ErrorKind::Config, "doublet amplitude must lie in [0, 1]");
  if (!(pulse_width > 0.0)) fail(ErrorKind::Config, "doublet pulse_width must be positive");
  if (!(t_start >= 0.0 && t_trim_pre >= 0.0 && t_trim_post >= 0.0))
    fail(ErrorKind::Config, "doublet times must be >= 0");
}

double doublet_signal(double t, const DoubletSpec& d) {
  if (t >= d.t_start && t < d.t_start + d.pulse_width) return d.amplitude;
  if (t >= d.t_start + d.pulse_width && t < d.t_start + 2.0 * d.pulse_width) return -d.amplitude;
  return 0.0;
}

void SafetyLimits::validate() const {
  if (!(phi_max > 0.0 && theta_max > 0.0 && r_max > 0.0))
    fail(ErrorKind::Config, "safety limits phi_max, theta_max, r_max must be positive");
  if (!(h_min < h_max)) fail(ErrorKind::Config, "safety limits require h_min < h_max");
  if (!(recovery_margin > 0.0 && recovery_margin < 1.0))
    fail(ErrorKind::Config, "recovery_margin must lie in (0, 1)");
  if (!(recovery_hold >= 0.0 && recovery_timeout > recovery_hold))
    fail(ErrorKind::Config, "recovery_timeout must exceed recovery_hold");
}

std::string_view violation_name(Violation v) {
  switch (v) {
    case Violation::Roll: return "phi_max";
    case Violation::Pitch: return "theta_max";
    case Violation::AltitudeLow: return "h_min";
    case Violation::AltitudeHigh: return "h_max";
    case Violation::YawRate: return "r_max";
  }
  return "?";
}

std::optional<Violation> check_safety(const FlightMeasurement& m, const SafetyLimits& l) {
  if (std::abs(m.phi) > l.phi_max) return Violation::Roll;
  if (std::abs(m.theta) > l.theta_max) return Violation::Pitch;
  if (m.h < l.h_min) return Violation::AltitudeLow;
  if (m.h > l.h_max) return Violation::AltitudeHigh;
  if (std::abs(m.yaw_rate) > l.r_max) return Violation::YawRate;
  return std::nullopt;
}

bool within_recovery_margin(const FlightMeasurement& m, const SafetyLimits& l, double h_set) {
  const double keep = 1.0 - l.recovery_margin;
  const double lo = h_set - keep * (h_set - l.h_min);
  const double hi = h_set + keep * (l.h_max - h_set);
  return std::abs(m.phi) <= keep * l.phi_max && std::abs(m.theta) <= keep * l.theta_max &&
         std::abs(m.yaw_rate) <= keep * l.r_max && m.h >= lo && m.h <= hi;
}

namespace {

ExperimentResult run_experiment(const FlightTestSetup& setup, Axis axis, double t_pre, double t_rec,
                                double t_post, const std::function<double(std::size_t)>& signal) {
  setup.plant.validate();
  setup.limits.validate();
  const double dt = setup.plant.dt;
  const auto n_pre = static_cast<std::size_t>(std::lround(t_pre / dt));
  const auto n_rec = static_cast<std::size_t>(std::lround(t_rec / dt));
  const auto n_post = static_cast<std::size_t>(std::lround(t_post / dt));
  const auto n_hold = static_cast<std::size_t>(std::lround(setup.limits.recovery_hold / dt));
  const auto n_timeout = static_cast<std::size_t>(std::lround(setup.limits.recovery_timeout / dt));

  HoverPlant plant(setup.plant, RigidState::zero(setup.plant, setup.setpoint.h));
  HoverController controller(setup.autopilot);
  FlightLogger log(setup.plant);
  ExperimentResult result;
  result.axis = axis;
  result.record_begin = n_pre;
  result.record_end = n_pre + n_rec;

  enum class Phase { Pre, Record, Recovery, Post };
  Phase phase = n_pre > 0 ? Phase::Pre : (n_rec > 0 ? Phase::Record : Phase::Post);
  std::size_t in_phase = 0;  // samples spent in the current phase
  std::size_t calm = 0;      // consecutive samples inside the recovery margin
  ControlVector u_prev;

  for (std::size_t k = 0;; ++k) {
    // Phase transitions happen at sample boundaries.
    if (phase == Phase::Pre && in_phase == n_pre) {
      phase = n_rec > 0 ? Phase::Record : Phase::Post;
      in_phase = 0;
    }
    if (phase == Phase::Record && in_phase == n_rec) {
      phase = Phase::Post;
      in_phase = 0;
    }
    if (phase == Phase::Post && in_phase == n_post) break;

    const FlightMeasurement m = plant.measure(u_prev).flight;
    if (phase == Phase::Record) {
      if (auto v = check_safety(m, setup.limits)) {
        result.status.completed = false;
        result.status.t_abort = dt * static_cast<double>(k);
        result.status.violation = v;
        result.record_end = k;
        phase = Phase::Recovery;
        in_phase = 0;
        calm = 0;
      }
    }
    if (phase == Phase::Recovery) {
      calm = within_recovery_margin(m, setup.limits, setup.setpoint.h) ? calm + 1 : 0;
      if (calm > n_hold) {
        result.status.recovered = true;
        phase = Phase::Post;
        in_phase = 0;
        if (n_post == 0) break;
      } else if (in_phase >= n_timeout) {
        break;
      }
    }

    AxisMask mask = AxisMask::all_closed_loop();
    if (phase == Phase::Record) mask.external(axis, signal(in_phase));
    const ControlVector u = controller.step(m, setup.setpoint, mask, dt);
    const PlantSample y = plant.measure(u);
    log.record(u, y, plant.state());
    plant.step(u);
    u_prev = u;
    ++in_phase;
  }
  result.history = log.finish();
  return result;
}

}  // namespace

ExperimentResult run_sweep(const FlightTestSetup& setup, Axis axis, const SweepSchedule& sched,
                           std::uint64_t seed) {
  sched.validate();
  WhiteNoise noise(seed);
  const double dt = setup.plant.dt;
  auto signal = [&](std::size_t j) { return sweep_signal(static_cast<double>(j) * dt, sched, noise); };
  ExperimentResult r = run_experiment(setup, axis, sched.t_trim_pre, sched.T_rec, sched.t_trim_post, signal);
  r.kind = "sweep";
  r.sweep = sched;
  return r;
}

ExperimentResult run_doublet(const FlightTestSetup& setup, Axis axis, const DoubletSpec& spec) {
  spec.validate();
  const double dt = setup.plant.dt;
  auto signal = [&](std::size_t j) { return doublet_signal(static_cast<double>(j) * dt, spec); };
  ExperimentResult r =
      run_experiment(setup, axis, spec.t_trim_pre, spec.record_length(), spec.t_trim_post, signal);
  r.kind = "doublet";
  r.doublet = spec;
  return r;
}

double hover_recovery_time(const FlightTestSetup& setup, const RigidState& x0, double t_max,
                           const HoverTolerance& tol) {
  HoverPlantConfig cfg = setup.plant;
  cfg.sensor_noise.clear();
  HoverPlant plant(cfg, x0);
  HoverController controller(setup.autopilot);
  const auto n = static_cast<std::size_t>(std::lround(t_max / cfg.dt));
  double settled = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const FlightMeasurement m = plant.measure(ControlVector{}).flight;
    const RigidState& x = plant.state();
    if (std::abs(x.phi) >= tol.attitude || std::abs(x.theta) >= tol.attitude ||
        std::abs(x.h - setup.setpoint.h) >= tol.altitude)
      settled = cfg.dt * static_cast<double>(k + 1);
    const ControlVector u = controller.step(m, setup.setpoint, AxisMask::all_closed_loop(), cfg.dt);
    plant.step(u);
  }
  return settled >= t_max - 0.5 * cfg.dt ? std::numeric_limits<double>::infinity() : settled;
}

double worst_recovery_time(const FlightTestSetup& setup, double reach, double t_max, const HoverTolerance& tol) {
  const SafetyLimits& L = setup.limits;
  double worst = 0.0;
  for (double sp : {-1.0, 1.0})
    for (double st : {-1.0, 1.0})
      for (double h : {setup.setpoint.h + reach * (L.h_min - setup.setpoint.h),
                       setup.setpoint.h + reach * (L.h_max - setup.setpoint.h)}) {
        RigidState x0 = RigidState::zero(setup.plant, h);
        x0.phi = sp * reach * L.phi_max;
        x0.theta = st * reach * L.theta_max;
        worst = std::max(worst, hover_recovery_time(setup, x0, t_max, tol));
      }
  return worst;
}

std::string experiment_file_name(std::string_view case_name, Axis axis, std::string_view kind) {
  return std::string(case_name) + "_" + std::string(axis_name(axis)) + "_" + std::string(kind) + ".th";
}

}  // namespace rotorid
