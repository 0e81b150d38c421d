#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rotorid/autopilot.hpp"
#include "rotorid/plant.hpp"
#include "rotorid/time_history.hpp"

namespace rotorid {

/// Exponential frequency sweep:
///   omega(t) = omega_min + K(t) (omega_max - omega_min)
///   K(t)     = C2 (exp(C1 t / T_rec) - 1)
struct SweepSchedule {
  double omega_min = 0.3;  // rad/s
  double omega_max = 12.0;
  double T_rec = 90.0;     // s
  double C1 = 4.0;
  /// Unset means 1 / (e^C1 - 1), which puts the sweep exactly on omega_max at T_rec.
  std::optional<double> C2;
  double amplitude = 0.1;
  double noise_fraction = 0.1;
  double t_trim_pre = 5.0;
  double t_trim_post = 5.0;
  double fade_time = 2.0;

  double c2() const;
  void validate() const;
};

double sweep_frequency(double t, const SweepSchedule& s);
/// Integral of sweep_frequency from 0 to t, in closed form.
double sweep_phase(double t, const SweepSchedule& s);

/// Seeded unit-variance Gaussian stream.
class WhiteNoise {
 public:
  explicit WhiteNoise(std::uint64_t seed) : engine_(seed) {}
  double next() { return dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// fade(t) * A * sin(theta(t)) + noise_fraction * A * n(t). Draws exactly one noise sample.
double sweep_signal(double t, const SweepSchedule& s, WhiteNoise& noise);
/// Sweep samples at t = k * dt for k in [0, round(T_rec / dt)).
std::vector<double> sweep_samples(const SweepSchedule& s, double dt, std::uint64_t seed);

struct DoubletSpec {
  double amplitude = 0.1;
  double pulse_width = 1.0;  // s
  double t_start = 1.0;      // s after the record starts
  double t_trim_pre = 5.0;
  double t_trim_post = 10.0;

  double record_length() const { return t_start + 2.0 * pulse_width; }
  void validate() const;
};

double doublet_signal(double t, const DoubletSpec& d);

struct SafetyLimits {
  double phi_max = 1.2;    // rad
  double theta_max = 1.2;  // rad
  double h_min = 30.0;     // m
  double h_max = 70.0;     // m
  double r_max = 1.5;      // rad/s
  /// Recovered once every limit holds with this fraction of margin for recovery_hold seconds.
  double recovery_margin = 0.5;
  double recovery_hold = 3.0;
  double recovery_timeout = 30.0;

  void validate() const;
};

enum class Violation { Roll, Pitch, AltitudeLow, AltitudeHigh, YawRate };

std::string_view violation_name(Violation v);

/// First violated limit in the order roll, pitch, min altitude, max altitude, yaw rate.
/// Limits are strict: a value exactly on a limit is accepted.
std::optional<Violation> check_safety(const FlightMeasurement& m, const SafetyLimits& limits);

/// True when all limits hold with the recovery margin. Altitude margin is taken
/// relative to the hover setpoint so an off-centre setpoint can still recover.
bool within_recovery_margin(const FlightMeasurement& m, const SafetyLimits& limits, double h_set);

struct ExperimentStatus {
  bool completed = true;
  double t_abort = 0.0;
  std::optional<Violation> violation;
  bool recovered = false;
};

struct ExperimentResult {
  TimeHistory history;
  ExperimentStatus status;
  Axis axis = Axis::Lateral;
  std::string kind;  // "sweep" or "doublet"
  /// Sample range of the injected record (truncated at abort).
  std::size_t record_begin = 0;
  std::size_t record_end = 0;
  std::optional<SweepSchedule> sweep;
  std::optional<DoubletSpec> doublet;
};

struct FlightTestSetup {
  HoverPlantConfig plant;
  AutopilotConfig autopilot = AutopilotConfig::defaults();
  HoverSetpoint setpoint;
  SafetyLimits limits;
};

/// Trim pad, sweep on `axis` with the other channels closed-loop and safety
/// checks every sample, then a trim pad. A violation aborts the sweep and hands
/// all channels back to the autopilot until recovery or timeout.
ExperimentResult run_sweep(const FlightTestSetup& setup, Axis axis, const SweepSchedule& sched,
                           std::uint64_t seed);

ExperimentResult run_doublet(const FlightTestSetup& setup, Axis axis, const DoubletSpec& spec);

struct HoverTolerance {
  double attitude = 0.02;  // rad, |phi| and |theta|
  double altitude = 0.5;   // m, |h - h_set|
};

/// Closed-loop hover on all axes from x0, noise-free. Returns the time after which
/// attitude and altitude stay inside `tol` until t_max, or +inf if they never settle.
double hover_recovery_time(const FlightTestSetup& setup, const RigidState& x0, double t_max = 30.0,
                           const HoverTolerance& tol = {});

/// Worst recovery time over initial attitudes and altitudes at the corners of the
/// safety envelope (scaled by `reach`, rates zero).
double worst_recovery_time(const FlightTestSetup& setup, double reach = 0.999, double t_max = 30.0,
                           const HoverTolerance& tol = {});

/// "<case>_<axis>_<kind>.th"
std::string experiment_file_name(std::string_view case_name, Axis axis, std::string_view kind);

}  // namespace rotorid
