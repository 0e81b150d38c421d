#include <immintrin.h>

#include <cmath>

#include "rotorid/kernels/dtft.hpp"

namespace rotorid::kernels {

namespace {

// Four frequencies per register.
template <bool Complex>
void dtft_lanes4(const double* re, const double* im, std::size_t n, const double* angles, double* out_re,
                 double* out_im) {
  alignas(32) double cs[4], sn[4], wr0[4], wi0[4];
  for (int l = 0; l < 4; ++l) {
    cs[l] = std::cos(angles[l]);
    sn[l] = std::sin(angles[l]);
  }
  const __m256d c = _mm256_load_pd(cs);
  const __m256d s = _mm256_load_pd(sn);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();

  for (std::size_t n0 = 0; n0 < n; n0 += kBlock) {
    for (int l = 0; l < 4; ++l) {
      const double phase = angles[l] * static_cast<double>(n0);
      wr0[l] = std::cos(phase);
      wi0[l] = -std::sin(phase);
    }
    __m256d wr = _mm256_load_pd(wr0);
    __m256d wi = _mm256_load_pd(wi0);
    const std::size_t end = n0 + kBlock < n ? n0 + kBlock : n;
    for (std::size_t i = n0; i < end; ++i) {
      const __m256d xr = _mm256_broadcast_sd(re + i);
      if constexpr (Complex) {
        const __m256d xi = _mm256_broadcast_sd(im + i);
        acc_re = _mm256_add_pd(acc_re, _mm256_fmsub_pd(xr, wr, _mm256_mul_pd(xi, wi)));
        acc_im = _mm256_add_pd(acc_im, _mm256_fmadd_pd(xr, wi, _mm256_mul_pd(xi, wr)));
      } else {
        acc_re = _mm256_fmadd_pd(xr, wr, acc_re);
        acc_im = _mm256_fmadd_pd(xr, wi, acc_im);
      }
      const __m256d nr = _mm256_fmadd_pd(wr, c, _mm256_mul_pd(wi, s));
      wi = _mm256_fmsub_pd(wi, c, _mm256_mul_pd(wr, s));
      wr = nr;
    }
  }
  _mm256_storeu_pd(out_re, acc_re);
  _mm256_storeu_pd(out_im, acc_im);
}

}  // namespace

void dtft_avx2(std::span<const double> re, std::span<const double> im, std::span<const double> angles,
               std::span<double> out_re, std::span<double> out_im) {
  const std::size_t m = angles.size();
  const std::size_t full = m - m % 4;
  for (std::size_t k = 0; k < full; k += 4) {
    if (im.empty())
      dtft_lanes4<false>(re.data(), nullptr, re.size(), angles.data() + k, out_re.data() + k,
                         out_im.data() + k);
    else
      dtft_lanes4<true>(re.data(), im.data(), re.size(), angles.data() + k, out_re.data() + k,
                        out_im.data() + k);
  }
  if (full < m)
    dtft_scalar(re, im, angles.subspan(full), out_re.subspan(full), out_im.subspan(full));
}

}  // namespace rotorid::kernels
