#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rotorid {

using Complex = std::complex<double>;

enum class Detrend { Mean, Linear };

/// Log-spaced evaluation grid, in Hz.
struct FrequencyGrid {
  double f_start = 0.0;
  double f_end = 0.0;
  std::size_t n_points = 100;

  /// Ascending grid in rad/s.
  std::vector<double> omega() const;
  /// 0.5 * omega_min up to min(2 * omega_max, 0.8 * Nyquist).
  static FrequencyGrid for_band(double omega_min, double omega_max, double dt, std::size_t n_points = 100);
};

struct SpectralConfig {
  double window_length = 20.0;  // s
  double overlap = 0.5;
  Detrend detrend = Detrend::Mean;  // applied per segment; taper is always Hann
  FrequencyGrid grid;
  /// Inputs were applied through a zero-order hold (sampled controller driving a
  /// continuous plant). Input transforms are then mapped to the held staircase's
  /// spectrum, removing the half-sample lag and sinc droop from H. Coherence is unaffected.
  bool zoh_input = false;

  void validate(double record_length) const;
};

struct FrequencyResponse {
  std::vector<double> freq;  // rad/s, strictly ascending
  std::vector<Complex> response;
  std::vector<double> coherence;  // in [0, 1]
  std::vector<double> n_d;        // averaging count per point
  std::vector<std::uint8_t> valid;
  std::string input, output;
  double window_length = 0.0;  // s; 0 for composites

  std::size_t size() const { return freq.size(); }
  std::size_t valid_count() const;
};

std::vector<double> detrend(std::span<const double> series, Detrend mode);

struct ChirpArc {
  double start = 0.0;  // rad/sample
  double step = 0.0;   // rad/sample
};

/// X[k] = sum_n x[n] exp(-j (start + k step) n), k in [0, m).
std::vector<Complex> chirp_z(std::span<const Complex> x, ChirpArc arc, std::size_t m);
/// Same transform for arbitrary per-point angles and real input.
std::vector<Complex> dtft_at(std::span<const double> x, std::span<const double> angles);

/// Hann-tapered, detrended transforms of every overlapped segment of a series:
/// result[segment][grid point]. `is_input` enables the hold compensation.
std::vector<std::vector<Complex>> segment_transforms(std::span<const double> x, double dt,
                                                     const SpectralConfig& cfg, bool is_input = false);

/// exp(-j w dt / 2) sin(w dt / 2) / (w dt / 2).
Complex zoh_factor(double omega, double dt);

/// One-sided density scale (per Hz) for a segment transform product, with taper power compensation.
double density_scale(double dt, const SpectralConfig& cfg);
std::size_t segment_samples(double dt, const SpectralConfig& cfg);
std::size_t segment_count(std::size_t n_samples, double dt, const SpectralConfig& cfg);

struct CrossSpectra {
  std::vector<double> freq;  // rad/s
  std::vector<double> Gxx, Gyy;
  std::vector<Complex> Gxy;  // conj(X) Y
  std::size_t n_d = 0;
};

CrossSpectra cross_spectrum(std::span<const double> x, std::span<const double> y, double dt,
                            const SpectralConfig& cfg);

/// H = Gxy / Gxx, coherence |Gxy|^2 / (Gxx Gyy). Points with Gxx = 0 are marked invalid.
FrequencyResponse frf_from_spectra(const CrossSpectra& s, std::string input, std::string output,
                                   double window_length);
FrequencyResponse frf_siso(std::span<const double> x, std::span<const double> y, double dt,
                           const SpectralConfig& cfg, std::string input = "u", std::string output = "y");

struct MagPhase {
  std::vector<double> mag_db;
  std::vector<double> phase_deg;  // unwrapped across valid points
  std::vector<std::uint8_t> valid;
};

MagPhase mag_phase(const FrequencyResponse& frf);

/// Removes +-360 degree jumps between consecutive flagged-valid points.
std::vector<double> unwrap_degrees(std::span<const double> wrapped, std::span<const std::uint8_t> valid);

/// Wraps to (-180, 180].
double wrap_degrees(double deg);

}  // namespace rotorid
