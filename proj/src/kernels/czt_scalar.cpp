#include <cmath>

#include "rotorid/kernels/dtft.hpp"

namespace rotorid::kernels {

void dtft_scalar(std::span<const double> re, std::span<const double> im, std::span<const double> angles,
                 std::span<double> out_re, std::span<double> out_im) {
  const std::size_t n = re.size();
  const bool complex_in = !im.empty();
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double a = angles[k];
    const double c = std::cos(a);
    const double s = std::sin(a);
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t n0 = 0; n0 < n; n0 += kBlock) {
      const double phase = a * static_cast<double>(n0);
      double wr = std::cos(phase);
      double wi = -std::sin(phase);
      const std::size_t end = n0 + kBlock < n ? n0 + kBlock : n;
      for (std::size_t i = n0; i < end; ++i) {
        const double xr = re[i];
        if (complex_in) {
          const double xi = im[i];
          acc_re += xr * wr - xi * wi;
          acc_im += xr * wi + xi * wr;
        } else {
          acc_re += xr * wr;
          acc_im += xr * wi;
        }
        const double nr = wr * c + wi * s;
        wi = wi * c - wr * s;
        wr = nr;
      }
    }
    out_re[k] = acc_re;
    out_im[k] = acc_im;
  }
}

}  // namespace rotorid::kernels
