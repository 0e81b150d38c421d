#include "rotorid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotorid/error.hpp"
#include "rotorid/kernels/dtft.hpp"
#include "rotorid/time_history.hpp"

namespace rotorid {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<double> FrequencyGrid::omega() const {
  std::vector<double> w(n_points);
  const double lo = std::log(f_start), hi = std::log(f_end);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double frac = n_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n_points - 1);
    w[i] = kTwoPi * std::exp(lo + frac * (hi - lo));
  }
  return w;
}

FrequencyGrid FrequencyGrid::for_band(double omega_min, double omega_max, double dt, std::size_t n_points) {
  const double nyquist = std::numbers::pi / dt;
  const double top = std::min(2.0 * omega_max, 0.8 * nyquist);
  return {0.5 * omega_min / kTwoPi, top / kTwoPi, n_points};
}

void SpectralConfig::validate(double record_length) const {
  if (!(window_length > 0.0)) fail(ErrorKind::Config, "spectral window_length must be positive");
  if (window_length > record_length + 1e-9)
    fail(ErrorKind::Data, "record of " + format_double(record_length) + " s is shorter than the " +
                              format_double(window_length) + " s window");
  if (!(overlap >= 0.0 && overlap < 1.0)) fail(ErrorKind::Config, "spectral overlap must lie in [0, 1)");
  if (grid.n_points < 2) fail(ErrorKind::Config, "frequency grid needs at least 2 points");
  if (!(grid.f_start > 0.0 && grid.f_start < grid.f_end))
    fail(ErrorKind::Config, "frequency grid needs 0 < f_start < f_end");
}

std::size_t FrequencyResponse::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

std::vector<double> detrend(std::span<const double> x, Detrend mode) {
  const std::size_t n = x.size();
  std::vector<double> out(x.begin(), x.end());
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  if (mode == Detrend::Mean || n < 2) {
    for (double& v : out) v -= mean;
    return out;
  }
  // Least-squares line about the centred index.
  const double tc = 0.5 * static_cast<double>(n - 1);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - tc;
    sxx += t * t;
    sxy += t * (x[i] - mean);
  }
  const double slope = sxy / sxx;
  for (std::size_t i = 0; i < n; ++i) out[i] -= mean + slope * (static_cast<double>(i) - tc);
  return out;
}

std::vector<Complex> chirp_z(std::span<const Complex> x, ChirpArc arc, std::size_t m) {
  std::vector<double> re(x.size()), im(x.size()), angles(m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    re[i] = x[i].real();
    im[i] = x[i].imag();
  }
  for (std::size_t k = 0; k < m; ++k) angles[k] = arc.start + static_cast<double>(k) * arc.step;
  std::vector<double> out_re(m), out_im(m);
  kernels::dtft(re, im, angles, out_re, out_im);
  std::vector<Complex> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = {out_re[k], out_im[k]};
  return out;
}

std::vector<Complex> dtft_at(std::span<const double> x, std::span<const double> angles) {
  std::vector<double> out_re(angles.size()), out_im(angles.size());
  kernels::dtft(x, {}, angles, out_re, out_im);
  std::vector<Complex> out(angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) out[k] = {out_re[k], out_im[k]};
  return out;
}

namespace {

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
  return w;
}

std::size_t segment_step(std::size_t len, const SpectralConfig& cfg) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(len) * (1.0 - cfg.overlap))));
}

}  // namespace

std::size_t segment_samples(double dt, const SpectralConfig& cfg) {
  return static_cast<std::size_t>(std::lround(cfg.window_length / dt));
}

std::size_t segment_count(std::size_t n_samples, double dt, const SpectralConfig& cfg) {
  const std::size_t len = segment_samples(dt, cfg);
  if (len == 0 || n_samples < len) return 0;
  return (n_samples - len) / segment_step(len, cfg) + 1;
}

double density_scale(double dt, const SpectralConfig& cfg) {
  double power = 0.0;
  for (double w : hann(segment_samples(dt, cfg))) power += w * w;
  return 2.0 * dt / power;
}

Complex zoh_factor(double omega, double dt) {
  const double half = 0.5 * omega * dt;
  const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
  return std::polar(sinc, -half);
}

std::vector<std::vector<Complex>> segment_transforms(std::span<const double> x, double dt,
                                                     const SpectralConfig& cfg, bool is_input) {
  cfg.validate(static_cast<double>(x.size()) * dt);
  const std::size_t len = segment_samples(dt, cfg);
  const std::size_t step = segment_step(len, cfg);
  const std::size_t n_seg = segment_count(x.size(), dt, cfg);
  if (n_seg == 0) fail(ErrorKind::Data, "record shorter than one spectral window");

  const std::vector<double> taper = hann(len);
  const std::vector<double> omega = cfg.grid.omega();
  std::vector<double> angles = omega;
  for (double& a : angles) a *= dt;
  std::vector<Complex> hold;
  if (is_input && cfg.zoh_input)
    for (double w : omega) hold.push_back(zoh_factor(w, dt));

  std::vector<std::vector<Complex>> out;
  out.reserve(n_seg);
  for (std::size_t s = 0; s < n_seg; ++s) {
    std::vector<double> seg = detrend(x.subspan(s * step, len), cfg.detrend);
    for (std::size_t i = 0; i < len; ++i) seg[i] *= taper[i];
    out.push_back(dtft_at(seg, angles));
    if (!hold.empty())
      for (std::size_t k = 0; k < hold.size(); ++k) out.back()[k] *= hold[k];
  }
  return out;
}

CrossSpectra cross_spectrum(std::span<const double> x, std::span<const double> y, double dt,
                            const SpectralConfig& cfg) {
  if (x.size() != y.size()) fail(ErrorKind::Data, "cross_spectrum: series lengths differ");
  const auto X = segment_transforms(x, dt, cfg, true);
  const auto Y = segment_transforms(y, dt, cfg, false);
  const std::size_t m = cfg.grid.n_points;
  CrossSpectra out;
  out.freq = cfg.grid.omega();
  out.Gxx.assign(m, 0.0);
  out.Gyy.assign(m, 0.0);
  out.Gxy.assign(m, Complex{});
  out.n_d = X.size();
  const double scale = density_scale(dt, cfg) / static_cast<double>(X.size());
  for (std::size_t s = 0; s < X.size(); ++s)
    for (std::size_t k = 0; k < m; ++k) {
      out.Gxx[k] += std::norm(X[s][k]);
      out.Gyy[k] += std::norm(Y[s][k]);
      out.Gxy[k] += std::conj(X[s][k]) * Y[s][k];
    }
  for (std::size_t k = 0; k < m; ++k) {
    out.Gxx[k] *= scale;
    out.Gyy[k] *= scale;
    out.Gxy[k] *= scale;
  }
  return out;
}

FrequencyResponse frf_from_spectra(const CrossSpectra& s, std::string input, std::string output,
                                   double window_length) {
  const std::size_t m = s.freq.size();
  FrequencyResponse f;
  f.freq = s.freq;
  f.response.assign(m, Complex{});
  f.coherence.assign(m, 0.0);
  f.n_d.assign(m, static_cast<double>(s.n_d));
  f.valid.assign(m, 0);
  f.input = std::move(input);
  f.output = std::move(output);
  f.window_length = window_length;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(s.Gxx[k] > 0.0)) continue;
    f.response[k] = s.Gxy[k] / s.Gxx[k];
    const double denom = s.Gxx[k] * s.Gyy[k];
    f.coherence[k] = denom > 0.0 ? std::clamp(std::norm(s.Gxy[k]) / denom, 0.0, 1.0) : 0.0;
    f.valid[k] = 1;
  }
  return f;
}

FrequencyResponse frf_siso(std::span<const double> x, std::span<const double> y, double dt,
                           const SpectralConfig& cfg, std::string input, std::string output) {
  return frf_from_spectra(cross_spectrum(x, y, dt, cfg), std::move(input), std::move(output),
                          cfg.window_length);
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

std::vector<double> unwrap_degrees(std::span<const double> wrapped, std::span<const std::uint8_t> valid) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!valid.empty() && !valid[i]) continue;
    if (have_prev) out[i] -= 360.0 * std::round((out[i] - prev) / 360.0);
    prev = out[i];
    have_prev = true;
  }
  return out;
}

MagPhase mag_phase(const FrequencyResponse& frf) {
  const std::size_t m = frf.size();
  MagPhase mp;
  mp.mag_db.resize(m);
  mp.valid = frf.valid;
  std::vector<double> wrapped(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::abs(frf.response[k]);
    if (a == 0.0) {
      mp.valid[k] = 0;
      mp.mag_db[k] = -std::numeric_limits<double>::infinity();
    } else {
      mp.mag_db[k] = 20.0 * std::log10(a);
    }
    wrapped[k] = std::arg(frf.response[k]) * 180.0 / std::numbers::pi;
  }
  mp.phase_deg = unwrap_degrees(wrapped, mp.valid);
  return mp;
}

}  // namespace rotorid
