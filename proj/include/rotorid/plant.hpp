#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorid/controls.hpp"
#include "rotorid/time_history.hpp"

namespace rotorid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ChannelLabels {
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// Descriptor-form linear model
///   M x' = F x + G u(t - tau)
///   y    = H x + J u(t - tau)
/// Dimensions and invertibility of M are validated on construction.
class LinearPlantModel {
 public:
  LinearPlantModel(Matrix M, Matrix F, Matrix G, Matrix H, Matrix J, std::vector<double> tau,
                   ChannelLabels labels);

  /// M = I, H = I, J = 0, tau = 0; outputs are labelled like the states.
  static LinearPlantModel with_full_state_output(Matrix F, Matrix G, std::vector<std::string> states,
                                                 std::vector<std::string> inputs);

  Eigen::Index n_states() const { return F_.rows(); }
  Eigen::Index n_inputs() const { return G_.cols(); }
  Eigen::Index n_outputs() const { return H_.rows(); }

  const Matrix& M() const { return M_; }
  const Matrix& F() const { return F_; }
  const Matrix& G() const { return G_; }
  const Matrix& H() const { return H_; }
  const Matrix& J() const { return J_; }
  const std::vector<double>& tau() const { return tau_; }
  const ChannelLabels& labels() const { return labels_; }

  /// M^-1 F and M^-1 G.
  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }

  Vector output(const Vector& x, const Vector& u) const { return H_ * x + J_ * u; }

 private:
  Matrix M_, F_, G_, H_, J_;
  std::vector<double> tau_;
  ChannelLabels labels_;
  Matrix A_, B_;
};

/// One classical RK4 step of x' = M^-1 (F x + G u), u held over the step.
Vector rk4_step(const LinearPlantModel& model, const Vector& x, const Vector& u, double dt);

/// Steady-state output per unit input: J - H F^-1 G. Throws if F is singular.
Matrix dc_gain(const LinearPlantModel& model);

/// Lateral block from the flight-identified hover model: states (P, R, Ay), inputs (aileron, rudder).
LinearPlantModel paper_lateral_model();
/// Lateral test plant with all modes between 0.5 and 8 rad/s, same structure as the paper block.
LinearPlantModel inband_lateral_model();
/// Pitch-rate lag plus longitudinal acceleration: states (q, Ax), input elevator.
LinearPlantModel default_longitudinal_model();
/// Vertical-speed lag: state w (positive down), input collective.
LinearPlantModel default_heave_model();

/// Full hover plant: three decoupled linear blocks plus attitude/altitude kinematics
///   phi' = P, theta' = q, psi' = R, h' = -w.
/// Block inputs are driven by: lateral <- (aileron, rudder), longitudinal <- elevator,
/// heave <- collective. Index 0 of the lateral states must be P and index 1 R;
/// index 0 of the longitudinal and heave states must be q and w.
struct HoverPlantConfig {
  LinearPlantModel lateral = paper_lateral_model();
  LinearPlantModel longitudinal = default_longitudinal_model();
  LinearPlantModel heave = default_heave_model();
  double dt = 0.02;
  /// Additive Gaussian sensor noise, std per measured channel name.
  std::map<std::string, double> sensor_noise;
  std::uint64_t seed = 1;

  void validate() const;
};

/// "Realistic" sensor-noise preset for robustness runs.
std::map<std::string, double> realistic_sensor_noise();

struct RigidState {
  Vector lateral;
  Vector longitudinal;
  Vector heave;
  double phi = 0.0, theta = 0.0, psi = 0.0;
  double h = 0.0;
  double t = 0.0;

  static RigidState zero(const HoverPlantConfig& cfg, double h = 0.0);
  double roll_rate() const { return lateral[0]; }
  double yaw_rate() const { return lateral[1]; }
  double pitch_rate() const { return longitudinal[0]; }
  double heave_rate() const { return heave[0]; }
  bool finite() const;
};

/// Sampled measurement of all channels at one instant.
struct PlantSample {
  Vector lateral_y, longitudinal_y, heave_y;
  double phi = 0.0, theta = 0.0, psi = 0.0, h = 0.0;
  FlightMeasurement flight;
};

/// Stateful stepper around HoverPlantConfig: integrates the augmented linear
/// system with RK4 at cfg.dt, applies per-input delays with a zero-order-hold
/// ring buffer, and generates seeded sensor noise.
class HoverPlant {
 public:
  HoverPlant(HoverPlantConfig cfg, RigidState x0);

  const HoverPlantConfig& config() const { return cfg_; }
  const RigidState& state() const { return state_; }
  std::size_t step_index() const { return step_; }

  /// Sensor readings for the current state given the control about to be applied.
  /// Noise is drawn once per step, so repeated calls within a step agree.
  PlantSample measure(const ControlVector& u);
  /// Advances one dt holding u. Throws (Numerical) naming the step if the state goes non-finite.
  void step(const ControlVector& u);

 private:
  Vector delayed_inputs(const ControlVector& u) const;

  HoverPlantConfig cfg_;
  LinearPlantModel augmented_;
  RigidState state_;
  std::size_t step_ = 0;
  std::vector<std::size_t> delay_steps_;
  std::vector<std::vector<double>> history_;  // per plant input, ring buffer
  std::mt19937_64 rng_;
  std::vector<std::pair<std::string, double>> noise_;  // resolved in channel order
  std::vector<int> noise_slot_;
  std::vector<double> draws_;
  std::size_t drawn_for_step_ = static_cast<std::size_t>(-1);
};

/// Appends one logged sample layout. Channel order: controls, measured outputs, true states, attitudes.
std::vector<std::string> logged_channel_names(const HoverPlantConfig& cfg);

/// Accumulates samples into a TimeHistory.
class FlightLogger {
 public:
  explicit FlightLogger(const HoverPlantConfig& cfg);
  void record(const ControlVector& u, const PlantSample& y, const RigidState& x);
  TimeHistory finish(double t0 = 0.0) const;

 private:
  double dt_;
  std::vector<std::string> names_, units_;
  std::vector<std::vector<double>> data_;
};

/// Open-loop simulation. `inputs` must hold the four control channels
/// (aileron, elevator, rudder, collective) at cfg.dt.
TimeHistory simulate(const HoverPlantConfig& cfg, const TimeHistory& inputs, const RigidState& x0);

}  // namespace rotorid
