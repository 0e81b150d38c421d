#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorid/spectral.hpp"

namespace rotorid {

/// One flight record: several input series and one output, equal length.
struct MisoRecord {
  std::vector<std::span<const double>> inputs;
  std::span<const double> output;
};

/// Auto and cross spectra among n_u inputs and one output on a common grid.
/// Gxx[k](i, j) = E[conj(X_i) X_j], Gxy[k](i) = E[conj(X_i) Y].
struct SpectralMatrixSet {
  std::vector<double> freq;  // rad/s
  std::vector<Eigen::MatrixXcd> Gxx;
  std::vector<Eigen::VectorXcd> Gxy;
  std::vector<double> Gyy;
  std::size_t n_d = 0;
  std::vector<std::string> input_labels;
  std::string output_label;
  double window_length = 0.0;

  std::size_t n_inputs() const { return input_labels.size(); }
};

/// Spectra pooled over every record with identical segmentation; n_d counts all
/// segments. Pooling records flown with different swept axes is what makes the
/// input matrix well conditioned when off-axis inputs come from feedback.
SpectralMatrixSet spectral_matrix(std::span<const MisoRecord> records, double dt, const SpectralConfig& cfg,
                                  std::vector<std::string> input_labels, std::string output_label);

struct ConditioningOptions {
  /// Two inputs: flag a point when |G12|^2 / (G11 G22) exceeds this.
  double max_input_coherence = 0.95;
  /// More than two inputs: flag when cond(normalized Gxx) exceeds this.
  double max_condition = 20.0;
  /// Inputs with auto-spectrum below this fraction of the largest are treated as absent.
  double absent_input_ratio = 1e-12;
  /// Conditioned auto-spectra at or below this fraction of the unconditioned value are unusable.
  double min_conditioned_ratio = 1e-10;
};

/// Solves Gxx H = Gxy per frequency; one response per input. The coherence field
/// of each result carries the partial coherence of that input.
std::vector<FrequencyResponse> conditioned_frf(const SpectralMatrixSet& s, const ConditioningOptions& opt = {});

struct PartialCoherence {
  std::vector<double> value;
  std::vector<std::uint8_t> valid;
};

/// Coherence of input i with the output after removing, in label order, the
/// linear effect of every other input from both.
std::vector<PartialCoherence> partial_coherence(const SpectralMatrixSet& s, const ConditioningOptions& opt = {});

/// Ordinary input-to-input coherence |Gij|^2 / (Gii Gjj) per frequency.
std::vector<double> input_coherence(const SpectralMatrixSet& s, std::size_t i, std::size_t j);

}  // namespace rotorid
