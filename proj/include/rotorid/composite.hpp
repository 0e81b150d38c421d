#pragma once

#include <vector>

#include "rotorid/spectral.hpp"

namespace rotorid {

struct CompositeConfig {
  std::vector<double> window_lengths = {40.0, 20.0, 10.0, 5.0};  // s
  std::vector<double> target_grid;                               // rad/s; empty = first input's grid
  double min_coherence = 0.6;
  /// A window only contributes at frequencies whose period fits min_cycles times into it.
  double min_cycles = 0.0;

  void validate() const;
};

/// Normalized random error of an FRF magnitude estimate,
/// sqrt(1 - g2) / (|g| sqrt(2 n_d)); infinite when g2 = 0.
double random_error(double gamma2, double n_d);

/// Linear in (log omega) of dB magnitude, unwrapped phase, coherence and n_d,
/// interpolating only between adjacent valid points. No extrapolation.
FrequencyResponse interpolate_to_grid(const FrequencyResponse& frf, const std::vector<double>& grid);

/// Inverse-squared-random-error weighted mean of dB magnitude and unwrapped
/// phase over windows that are valid with coherence >= min_coherence.
/// Per-window phase is first shifted by whole turns to agree with the longest
/// window at the lowest frequency they share.
FrequencyResponse combine(const std::vector<FrequencyResponse>& frfs, const CompositeConfig& cfg);

}  // namespace rotorid
