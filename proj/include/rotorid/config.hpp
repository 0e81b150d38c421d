#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rotorid/autopilot.hpp"
#include "rotorid/composite.hpp"
#include "rotorid/conditioning.hpp"
#include "rotorid/flighttest.hpp"
#include "rotorid/plant.hpp"
#include "rotorid/spectral.hpp"
#include "rotorid/ssid.hpp"
#include "rotorid/verify.hpp"

namespace rotorid {

struct PlantSection {
  std::string lateral_preset = "inband";  // inband | paper
  std::optional<Matrix> lateral_F, lateral_G;  // override the preset when set
  std::vector<double> lateral_tau;             // empty = zero delay
  double dt = 0.02;
  std::string sensor_noise = "none";  // none | realistic
};

struct SweepSection {
  std::vector<Axis> axes = {Axis::Lateral, Axis::Pedal};
  SweepSchedule schedule;
  /// Per-axis overrides of numeric schedule keys, e.g. sweep.pedal.amplitude.
  std::map<Axis, std::map<std::string, double>> overrides;
  SweepSchedule for_axis(Axis a) const;
};

struct DoubletSection {
  std::vector<Axis> axes = {Axis::Lateral, Axis::Pedal};
  DoubletSpec spec;
};

struct SpectralSection {
  double overlap = 0.5;
  Detrend detrend = Detrend::Mean;
  std::size_t n_points = 100;
  double f_start = 0.0;  // Hz; 0 = from the sweep band
  double f_end = 0.0;
  bool zoh_input = true;
  /// Analyse the whole log including trim pads rather than just the sweep record.
  bool include_pads = true;
};

struct SsidSection {
  std::vector<std::string> free = {"F11", "F13", "F22", "F31", "F33", "G11", "G22", "G31"};
  std::map<std::string, double> initial;  // missing free entries start at initial_scale x structure value
  double initial_scale = 1.5;
  std::optional<Matrix> F, G;  // structure template; defaults to the plant's lateral block
  CostWeights weights;
  FitOptions options;
  double omega_lo = 0.3, omega_hi = 12.0;
};

struct PipelineConfig {
  std::string case_name = "hover";
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  PlantSection plant;
  AutopilotConfig autopilot = AutopilotConfig::defaults();
  HoverSetpoint setpoint;
  SafetyLimits safety;
  SweepSection sweep;
  DoubletSection doublet;
  SpectralSection spectral;
  ConditioningOptions conditioning;
  CompositeConfig composite = [] {
    CompositeConfig c;
    c.min_cycles = 4.0;
    return c;
  }();
  SsidSection ssid;
  VerifyOptions verify;

  void validate() const;

  HoverPlantConfig plant_config() const;
  FlightTestSetup setup() const;
  LinearPlantModel lateral_model() const;
  SpectralConfig spectral_config(double window_length) const;
  ModelStructure model_structure() const;
};

/// Flat `section.key = value` text, `#` starts a comment. Missing keys keep their
/// defaults; unknown keys, malformed values and violated invariants throw (Config)
/// with the line number.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// Every key, in a fixed order, in a form parse_config reads back unchanged.
std::string serialize_config(const PipelineConfig& cfg);

std::string format_matrix(const Matrix& m);
Matrix parse_matrix(const std::string& text);

}  // namespace rotorid
