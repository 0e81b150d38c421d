#pragma once

#include <span>
#include <string_view>

// Arbitrary-frequency DTFT evaluation, the inner loop of the chirp-z stage:
//
//   X[k] = sum_n x[n] * exp(-j * angle[k] * n)
//
// Each lane keeps a rotating phasor that is reseeded from exact cos/sin every
// kBlock samples, which bounds recurrence drift to a few ulps per block.
// All variants share that algorithm so they agree to rounding.

namespace rotorid::kernels {

inline constexpr std::size_t kBlock = 32;

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

/// True when the AVX2 variant was compiled in and the CPU reports AVX2 and FMA.
bool avx2_available();

/// Backend used by dtft(). Chosen on first use from the CPU, or from the
/// ROTORID_KERNEL environment variable ("scalar" / "avx2") when set.
Backend active_backend();
/// Throws if the backend is unavailable on this machine.
void set_backend(Backend b);

// `im` may be empty for real input. Output spans have angles.size() entries.
void dtft_scalar(std::span<const double> re, std::span<const double> im, std::span<const double> angles,
                 std::span<double> out_re, std::span<double> out_im);
#if defined(ROTORID_BUILD_AVX2)
void dtft_avx2(std::span<const double> re, std::span<const double> im, std::span<const double> angles,
               std::span<double> out_re, std::span<double> out_im);
#endif

void dtft(std::span<const double> re, std::span<const double> im, std::span<const double> angles,
          std::span<double> out_re, std::span<double> out_im);

}  // namespace rotorid::kernels
