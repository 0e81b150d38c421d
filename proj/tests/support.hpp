#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace rotorid::testing {

inline std::vector<double> white(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

/// a / (s + a) driven through a zero-order hold, sampled exactly.
inline std::vector<double> lag(const std::vector<double>& u, double a, double dt) {
  std::vector<double> y(u.size());
  const double e = std::exp(-a * dt);
  double x = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    y[k] = x;
    x = e * x + (1.0 - e) * u[k];
  }
  return y;
}

/// y = 3/(s+3) x1 + h2_gain/(s+1) x2 with x2 = 0.5 x1 + e.
struct TwoInputOracle {
  std::vector<double> x1, x2, y;
  static constexpr double dt = 0.02;

  explicit TwoInputOracle(std::size_t n = 15000, double h2_gain = 1.0, std::uint64_t seed = 17) {
    x1 = white(n, seed);
    auto e = white(n, seed + 1);
    x2.resize(n);
    for (std::size_t k = 0; k < n; ++k) x2[k] = 0.5 * x1[k] + e[k];
    auto y1 = lag(x1, 3.0, dt), y2 = lag(x2, 1.0, dt);
    y.resize(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = y1[k] + h2_gain * y2[k];
  }

  static std::complex<double> h1(double w) { return 3.0 / std::complex<double>(3.0, w); }
  static std::complex<double> h2(double w, double gain = 1.0) { return gain / std::complex<double>(1.0, w); }
};

inline double db(std::complex<double> h) { return 20.0 * std::log10(std::abs(h)); }

inline double phase_error_deg(std::complex<double> a, std::complex<double> b) {
  return std::abs(std::arg(a / b)) * 180.0 / M_PI;
}

// Hann segments at 50% overlap average like n_d / (1 + 2 * 0.167^2) independent ones.
inline double effective_averages(std::size_t n_d) { return static_cast<double>(n_d) / (1.0 + 2.0 * 0.167 * 0.167); }

// gamma^2 level that an estimate between independent signals exceeds with probability p,
// after conditioning on `removed` other inputs: P(gamma^2 > x) = (1 - x)^(n - 1 - removed).
inline double null_coherence_level(std::size_t n_d, std::size_t removed, double p) {
  return 1.0 - std::pow(p, 1.0 / (effective_averages(n_d) - 1.0 - static_cast<double>(removed)));
}

}  // namespace rotorid::testing
