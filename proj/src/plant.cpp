#include "rotorid/plant.hpp"

#include <algorithm>
#include <cmath>

#include "rotorid/error.hpp"

namespace rotorid {

// ---------------------------------------------------------------------------
// controls

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::Lateral: return "lateral";
    case Axis::Longitudinal: return "longitudinal";
    case Axis::Pedal: return "pedal";
    case Axis::Collective: return "collective";
  }
  return "?";
}

std::string_view control_channel(Axis axis) {
  switch (axis) {
    case Axis::Lateral: return "aileron";
    case Axis::Longitudinal: return "elevator";
    case Axis::Pedal: return "rudder";
    case Axis::Collective: return "collective";
  }
  return "?";
}

std::optional<Axis> parse_axis(std::string_view name) {
  for (Axis a : kAllAxes)
    if (axis_name(a) == name) return a;
  return std::nullopt;
}

double& ControlVector::operator[](Axis a) {
  switch (a) {
    case Axis::Lateral: return lateral_cyclic;
    case Axis::Longitudinal: return longitudinal_cyclic;
    case Axis::Pedal: return pedal;
    case Axis::Collective: break;
  }
  return collective;
}

double ControlVector::operator[](Axis a) const { return const_cast<ControlVector&>(*this)[a]; }

ControlVector ControlVector::clamped() const {
  ControlVector c = *this;
  for (Axis a : kAllAxes) c[a] = std::clamp(c[a], -1.0, 1.0);
  return c;
}

// ---------------------------------------------------------------------------
// LinearPlantModel

namespace {

void check_dims(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols)
    fail(ErrorKind::Config, std::string("matrix ") + name + " is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                                "x" + std::to_string(cols));
}

std::string unit_for(const std::string& label) {
  if (label == "P" || label == "R" || label == "q" || label == "p" || label == "r")
    return "rad/s";
  if (label == "Ay" || label == "Ax" || label == "Az") return "m/s^2";
  if (label == "w" || label == "u" || label == "v") return "m/s";
  return "nd";
}

}  // namespace

LinearPlantModel::LinearPlantModel(Matrix M, Matrix F, Matrix G, Matrix H, Matrix J,
                                   std::vector<double> tau, ChannelLabels labels)
    : M_(std::move(M)),
      F_(std::move(F)),
      G_(std::move(G)),
      H_(std::move(H)),
      J_(std::move(J)),
      tau_(std::move(tau)),
      labels_(std::move(labels)) {
  const Eigen::Index nx = F_.rows();
  if (nx == 0) fail(ErrorKind::Config, "plant has no states");
  check_dims(F_, nx, nx, "F");
  check_dims(M_, nx, nx, "M");
  const Eigen::Index nu = G_.cols();
  check_dims(G_, nx, nu, "G");
  const Eigen::Index ny = H_.rows();
  check_dims(H_, ny, nx, "H");
  check_dims(J_, ny, nu, "J");
  if (static_cast<Eigen::Index>(tau_.size()) != nu)
    fail(ErrorKind::Config, "tau has " + std::to_string(tau_.size()) + " entries, expected " +
                                std::to_string(nu));
  for (double t : tau_)
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::Config, "tau must be finite and >= 0");
  if (static_cast<Eigen::Index>(labels_.states.size()) != nx ||
      static_cast<Eigen::Index>(labels_.inputs.size()) != nu ||
      static_cast<Eigen::Index>(labels_.outputs.size()) != ny)
    fail(ErrorKind::Config, "plant label counts do not match matrix dimensions");

  // Invertibility of M via a linear solve against the identity.
  Eigen::FullPivLU<Matrix> lu(M_);
  if (!lu.isInvertible()) fail(ErrorKind::Config, "matrix M is singular");
  const Matrix Minv = lu.solve(Matrix::Identity(nx, nx));
  if (((M_ * Minv) - Matrix::Identity(nx, nx)).norm() > 1e-9)
    fail(ErrorKind::Config, "matrix M is ill-conditioned");
  A_ = Minv * F_;
  B_ = Minv * G_;
}

LinearPlantModel LinearPlantModel::with_full_state_output(Matrix F, Matrix G,
                                                          std::vector<std::string> states,
                                                          std::vector<std::string> inputs) {
  const Eigen::Index nx = F.rows();
  const Eigen::Index nu = G.cols();
  ChannelLabels labels{states, std::move(inputs), states};
  return LinearPlantModel(Matrix::Identity(nx, nx), std::move(F), std::move(G),
                          Matrix::Identity(nx, nx), Matrix::Zero(nx, nu),
                          std::vector<double>(static_cast<std::size_t>(nu), 0.0), std::move(labels));
}

Vector rk4_step(const LinearPlantModel& model, const Vector& x, const Vector& u, double dt) {
  if (x.size() != model.n_states())
    fail(ErrorKind::Data, "rk4_step: state has " + std::to_string(x.size()) + " entries, F expects " +
                              std::to_string(model.n_states()));
  if (u.size() != model.n_inputs())
    fail(ErrorKind::Data, "rk4_step: input has " + std::to_string(u.size()) + " entries, G expects " +
                              std::to_string(model.n_inputs()));
  if (!(dt > 0.0)) fail(ErrorKind::Data, "rk4_step: dt must be positive");
  const Matrix& A = model.A();
  const Vector bu = model.B() * u;
  const Vector k1 = A * x + bu;
  const Vector k2 = A * (x + 0.5 * dt * k1) + bu;
  const Vector k3 = A * (x + 0.5 * dt * k2) + bu;
  const Vector k4 = A * (x + dt * k3) + bu;
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix dc_gain(const LinearPlantModel& model) {
  Eigen::FullPivLU<Matrix> lu(model.F());
  if (!lu.isInvertible()) fail(ErrorKind::Numerical, "dc_gain: F is singular");
  return model.J() - model.H() * lu.solve(model.G());
}

// ---------------------------------------------------------------------------
// default blocks

LinearPlantModel paper_lateral_model() {
  Matrix F(3, 3), G(3, 2);
  // clang-format off
  F << -64.11,  0.0,    37.66,
         0.0,  -68.03,   0.0,
         0.6056, 0.0,   -0.5749;
  G <<  87.0,    1.0,
         1.0,  171.3,
        -0.4814, 1.0;
  // clang-format on
  return LinearPlantModel::with_full_state_output(F, G, {"P", "R", "Ay"}, {"aileron", "rudder"});
}

LinearPlantModel inband_lateral_model() {
  Matrix F(3, 3), G(3, 2);
  // Modes at 0.72, 2.5 and 5.28 rad/s.
  // clang-format off
  F << -5.0, 0.0,  3.0,
        0.0, -2.5, 0.0,
        0.4, 0.0, -1.0;
  G <<  8.0, 1.0,
        1.0, 6.0,
       -0.5, 1.0;
  // clang-format on
  return LinearPlantModel::with_full_state_output(F, G, {"P", "R", "Ay"}, {"aileron", "rudder"});
}

LinearPlantModel default_longitudinal_model() {
  Matrix F(2, 2), G(2, 1);
  F << -4.0, 0.0, 0.6, -0.6;
  G << 8.0, 0.0;
  return LinearPlantModel::with_full_state_output(F, G, {"q", "Ax"}, {"elevator"});
}

LinearPlantModel default_heave_model() {
  Matrix F(1, 1), G(1, 1);
  F << -1.5;
  G << -6.0;
  return LinearPlantModel::with_full_state_output(F, G, {"w"}, {"collective"});
}

std::map<std::string, double> realistic_sensor_noise() {
  return {{"P", 0.005},  {"R", 0.005},   {"Ay", 0.05},  {"q", 0.005},
          {"Ax", 0.05},  {"w", 0.05},    {"phi", 0.002}, {"theta", 0.002},
          {"psi", 0.002}, {"h", 0.05}};
}

namespace {

Eigen::Index find_label(const std::vector<std::string>& labels, const std::string& name) {
  auto it = std::find(labels.begin(), labels.end(), name);
  return it == labels.end() ? -1 : static_cast<Eigen::Index>(it - labels.begin());
}

std::vector<std::string> measured_channels(const HoverPlantConfig& cfg) {
  std::vector<std::string> out;
  for (const auto* m : {&cfg.lateral, &cfg.longitudinal, &cfg.heave})
    for (const auto& l : m->labels().outputs) out.push_back(l);
  for (const char* a : {"phi", "theta", "psi", "h"}) out.push_back(a);
  return out;
}

}  // namespace

void HoverPlantConfig::validate() const {
  if (!(dt > 0.0)) fail(ErrorKind::Config, "plant.dt must be positive");
  if (lateral.n_inputs() != 2) fail(ErrorKind::Config, "lateral block needs inputs (aileron, rudder)");
  if (longitudinal.n_inputs() != 1) fail(ErrorKind::Config, "longitudinal block needs one input");
  if (heave.n_inputs() != 1) fail(ErrorKind::Config, "heave block needs one input");
  if (lateral.n_states() < 2 || longitudinal.n_states() < 1 || heave.n_states() < 1)
    fail(ErrorKind::Config, "hover plant blocks too small for the kinematic couplings");
  if (find_label(lateral.labels().outputs, "P") < 0 || find_label(lateral.labels().outputs, "R") < 0)
    fail(ErrorKind::Config, "lateral block must output P and R");
  if (find_label(longitudinal.labels().outputs, "q") < 0)
    fail(ErrorKind::Config, "longitudinal block must output q");
  if (find_label(heave.labels().outputs, "w") < 0) fail(ErrorKind::Config, "heave block must output w");
  const auto names = measured_channels(*this);
  for (const auto& [ch, sd] : sensor_noise) {
    if (std::find(names.begin(), names.end(), ch) == names.end())
      fail(ErrorKind::Config, "sensor noise for unknown channel '" + ch + "'");
    if (!(sd >= 0.0)) fail(ErrorKind::Config, "sensor noise std must be >= 0");
  }
}

// ---------------------------------------------------------------------------
// RigidState

RigidState RigidState::zero(const HoverPlantConfig& cfg, double h) {
  RigidState s;
  s.lateral = Vector::Zero(cfg.lateral.n_states());
  s.longitudinal = Vector::Zero(cfg.longitudinal.n_states());
  s.heave = Vector::Zero(cfg.heave.n_states());
  s.h = h;
  return s;
}

bool RigidState::finite() const {
  return lateral.allFinite() && longitudinal.allFinite() && heave.allFinite() && std::isfinite(phi) &&
         std::isfinite(theta) && std::isfinite(psi) && std::isfinite(h) && std::isfinite(t);
}

// ---------------------------------------------------------------------------
// HoverPlant

namespace {

LinearPlantModel build_augmented(const HoverPlantConfig& c) {
  const Eigen::Index nl = c.lateral.n_states(), no = c.longitudinal.n_states(), nh = c.heave.n_states();
  const Eigen::Index n = nl + no + nh + 4;
  Matrix A = Matrix::Zero(n, n), B = Matrix::Zero(n, 4);
  A.block(0, 0, nl, nl) = c.lateral.A();
  A.block(nl, nl, no, no) = c.longitudinal.A();
  A.block(nl + no, nl + no, nh, nh) = c.heave.A();
  B.block(0, 0, nl, 2) = c.lateral.B();
  B.block(nl, 2, no, 1) = c.longitudinal.B();
  B.block(nl + no, 3, nh, 1) = c.heave.B();
  const Eigen::Index iphi = nl + no + nh;
  A(iphi, 0) = 1.0;          // phi' = P
  A(iphi + 1, nl) = 1.0;     // theta' = q
  A(iphi + 2, 1) = 1.0;      // psi' = R
  A(iphi + 3, nl + no) = -1.0;  // h' = -w
  std::vector<std::string> states(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) states[static_cast<std::size_t>(i)] = "z" + std::to_string(i);
  return LinearPlantModel::with_full_state_output(A, B, states,
                                                  {"aileron", "rudder", "elevator", "collective"});
}

}  // namespace

HoverPlant::HoverPlant(HoverPlantConfig cfg, RigidState x0)
    : cfg_(std::move(cfg)), augmented_((cfg_.validate(), build_augmented(cfg_))), state_(std::move(x0)),
      rng_(cfg_.seed) {
  if (state_.lateral.size() != cfg_.lateral.n_states() ||
      state_.longitudinal.size() != cfg_.longitudinal.n_states() ||
      state_.heave.size() != cfg_.heave.n_states())
    fail(ErrorKind::Data, "initial state dimensions do not match the plant");
  std::vector<double> tau = cfg_.lateral.tau();
  tau.push_back(cfg_.longitudinal.tau()[0]);
  tau.push_back(cfg_.heave.tau()[0]);
  for (double t : tau) delay_steps_.push_back(static_cast<std::size_t>(std::lround(t / cfg_.dt)));
  history_.resize(4);

  const auto names = measured_channels(cfg_);
  noise_slot_.assign(names.size(), -1);
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = cfg_.sensor_noise.find(names[i]);
    if (it != cfg_.sensor_noise.end() && it->second > 0.0) {
      noise_slot_[i] = static_cast<int>(noise_.size());
      noise_.emplace_back(names[i], it->second);
    }
  }
}

Vector HoverPlant::delayed_inputs(const ControlVector& u) const {
  const double now[4] = {u.lateral_cyclic, u.pedal, u.longitudinal_cyclic, u.collective};
  Vector out(4);
  for (std::size_t j = 0; j < 4; ++j) {
    const std::size_t d = delay_steps_[j];
    if (d == 0)
      out[static_cast<Eigen::Index>(j)] = now[j];
    else
      out[static_cast<Eigen::Index>(j)] = step_ < d ? 0.0 : history_[j][step_ - d];
  }
  return out;
}

PlantSample HoverPlant::measure(const ControlVector& u) {
  const Vector ua = delayed_inputs(u);
  PlantSample s;
  s.lateral_y = cfg_.lateral.output(state_.lateral, ua.head(2));
  s.longitudinal_y = cfg_.longitudinal.output(state_.longitudinal, ua.segment(2, 1));
  s.heave_y = cfg_.heave.output(state_.heave, ua.segment(3, 1));
  s.phi = state_.phi;
  s.theta = state_.theta;
  s.psi = state_.psi;
  s.h = state_.h;

  if (!noise_.empty()) {
    if (drawn_for_step_ != step_) {
      draws_.resize(noise_.size());
      std::normal_distribution<double> unit(0.0, 1.0);
      for (std::size_t i = 0; i < noise_.size(); ++i) draws_[i] = noise_[i].second * unit(rng_);
      drawn_for_step_ = step_;
    }
    const std::vector<double>& draws = draws_;
    std::size_t slot = 0;
    auto apply = [&](double& v) {
      const int k = noise_slot_[slot++];
      if (k >= 0) v += draws[static_cast<std::size_t>(k)];
    };
    for (Vector* y : {&s.lateral_y, &s.longitudinal_y, &s.heave_y})
      for (Eigen::Index i = 0; i < y->size(); ++i) apply((*y)[i]);
    apply(s.phi);
    apply(s.theta);
    apply(s.psi);
    apply(s.h);
  }

  const auto& lat = cfg_.lateral.labels().outputs;
  s.flight.roll_rate = s.lateral_y[find_label(lat, "P")];
  s.flight.yaw_rate = s.lateral_y[find_label(lat, "R")];
  s.flight.pitch_rate = s.longitudinal_y[find_label(cfg_.longitudinal.labels().outputs, "q")];
  s.flight.heave_rate = s.heave_y[find_label(cfg_.heave.labels().outputs, "w")];
  s.flight.phi = s.phi;
  s.flight.theta = s.theta;
  s.flight.psi = s.psi;
  s.flight.h = s.h;
  return s;
}

void HoverPlant::step(const ControlVector& u) {
  const Vector ua = delayed_inputs(u);
  history_[0].push_back(u.lateral_cyclic);
  history_[1].push_back(u.pedal);
  history_[2].push_back(u.longitudinal_cyclic);
  history_[3].push_back(u.collective);

  const Eigen::Index nl = state_.lateral.size(), no = state_.longitudinal.size(),
                     nh = state_.heave.size();
  Vector z(nl + no + nh + 4);
  z << state_.lateral, state_.longitudinal, state_.heave, state_.phi, state_.theta, state_.psi, state_.h;
  z = rk4_step(augmented_, z, ua, cfg_.dt);
  state_.lateral = z.head(nl);
  state_.longitudinal = z.segment(nl, no);
  state_.heave = z.segment(nl + no, nh);
  state_.phi = z[nl + no + nh];
  state_.theta = z[nl + no + nh + 1];
  state_.psi = z[nl + no + nh + 2];
  state_.h = z[nl + no + nh + 3];
  ++step_;
  state_.t = static_cast<double>(step_) * cfg_.dt;
  if (!state_.finite())
    fail(ErrorKind::Numerical, "plant state became non-finite at step " + std::to_string(step_ - 1));
}

// ---------------------------------------------------------------------------
// logging

std::vector<std::string> logged_channel_names(const HoverPlantConfig& cfg) {
  std::vector<std::string> names;
  for (Axis a : kAllAxes) names.emplace_back(control_channel(a));
  for (const auto* m : {&cfg.lateral, &cfg.longitudinal, &cfg.heave})
    for (const auto& l : m->labels().outputs) names.push_back(l);
  for (const auto* m : {&cfg.lateral, &cfg.longitudinal, &cfg.heave})
    for (const auto& l : m->labels().states) names.push_back("x_" + l);
  for (const char* a : {"phi", "theta", "psi", "h"}) names.emplace_back(a);
  return names;
}

FlightLogger::FlightLogger(const HoverPlantConfig& cfg) : dt_(cfg.dt) {
  for (Axis a : kAllAxes) {
    names_.emplace_back(control_channel(a));
    units_.emplace_back("nd");
  }
  for (const auto* m : {&cfg.lateral, &cfg.longitudinal, &cfg.heave})
    for (const auto& l : m->labels().outputs) {
      names_.push_back(l);
      units_.push_back(unit_for(l));
    }
  for (const auto* m : {&cfg.lateral, &cfg.longitudinal, &cfg.heave})
    for (const auto& l : m->labels().states) {
      names_.push_back("x_" + l);
      units_.push_back(unit_for(l));
    }
  for (const char* a : {"phi", "theta", "psi"}) {
    names_.emplace_back(a);
    units_.emplace_back("rad");
  }
  names_.emplace_back("h");
  units_.emplace_back("m");
  data_.resize(names_.size());
}

void FlightLogger::record(const ControlVector& u, const PlantSample& y, const RigidState& x) {
  std::size_t i = 0;
  for (Axis a : kAllAxes) data_[i++].push_back(u[a]);
  for (const Vector* v : {&y.lateral_y, &y.longitudinal_y, &y.heave_y})
    for (Eigen::Index k = 0; k < v->size(); ++k) data_[i++].push_back((*v)[k]);
  for (const Vector* v : {&x.lateral, &x.longitudinal, &x.heave})
    for (Eigen::Index k = 0; k < v->size(); ++k) data_[i++].push_back((*v)[k]);
  data_[i++].push_back(y.phi);
  data_[i++].push_back(y.theta);
  data_[i++].push_back(y.psi);
  data_[i++].push_back(y.h);
}

TimeHistory FlightLogger::finish(double t0) const {
  TimeHistory h(dt_, t0);
  for (std::size_t i = 0; i < names_.size(); ++i) h.add(names_[i], units_[i], data_[i]);
  return h;
}

TimeHistory simulate(const HoverPlantConfig& cfg, const TimeHistory& inputs, const RigidState& x0) {
  if (std::abs(inputs.dt() - cfg.dt) > 1e-12 * cfg.dt)
    fail(ErrorKind::Data, "simulate: input sample interval " + format_double(inputs.dt()) +
                              " s does not match plant dt " + format_double(cfg.dt) + " s");
  std::array<std::span<const double>, 4> u;
  for (Axis a : kAllAxes) u[static_cast<std::size_t>(a)] = inputs[control_channel(a)];

  HoverPlant plant(cfg, x0);
  FlightLogger log(plant.config());
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    ControlVector c;
    for (Axis a : kAllAxes) c[a] = u[static_cast<std::size_t>(a)][k];
    const PlantSample y = plant.measure(c);
    log.record(c, y, plant.state());
    plant.step(c);
  }
  return log.finish(inputs.t0());
}

}  // namespace rotorid
