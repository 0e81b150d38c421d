#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rotorid/kernels/dtft.hpp"

using namespace rotorid::kernels;

namespace {

struct Case {
  std::vector<double> re, im, angles;
};

Case random_case(std::size_t n, std::size_t m, bool complex_input, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> a(0.0, M_PI);
  Case c;
  for (std::size_t i = 0; i < n; ++i) c.re.push_back(g(rng));
  if (complex_input)
    for (std::size_t i = 0; i < n; ++i) c.im.push_back(g(rng));
  for (std::size_t k = 0; k < m; ++k) c.angles.push_back(a(rng));
  return c;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b, double scale) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / scale;
}

}  // namespace

TEST_CASE("scalar kernel matches a direct sum") {
  auto c = random_case(257, 37, true, 3);
  std::vector<double> re(37), im(37);
  dtft_scalar(c.re, c.im, c.angles, re, im);
  for (std::size_t k = 0; k < c.angles.size(); ++k) {
    long double sr = 0, si = 0;
    for (std::size_t n = 0; n < c.re.size(); ++n) {
      const long double ph = -static_cast<long double>(c.angles[k]) * n;
      sr += c.re[n] * std::cos(ph) - c.im[n] * std::sin(ph);
      si += c.re[n] * std::sin(ph) + c.im[n] * std::cos(ph);
    }
    CHECK(std::abs(re[k] - static_cast<double>(sr)) < 1e-10 * 16.0);
    CHECK(std::abs(im[k] - static_cast<double>(si)) < 1e-10 * 16.0);
  }
}

#if defined(ROTORID_BUILD_AVX2)
TEST_CASE("avx2 kernel agrees with the scalar kernel") {
  if (!avx2_available()) return;
  for (std::size_t n : {1u, 2u, 3u, 31u, 32u, 33u, 64u, 100u, 257u, 2000u})
    for (std::size_t m : {1u, 3u, 4u, 5u, 17u, 100u})
      for (bool cplx : {false, true}) {
        auto c = random_case(n, m, cplx, n * 131 + m);
        std::vector<double> sr(m), si(m), vr(m), vi(m);
        dtft_scalar(c.re, c.im, c.angles, sr, si);
        dtft_avx2(c.re, c.im, c.angles, vr, vi);
        const double scale = std::sqrt(static_cast<double>(n)) + 1.0;
        CHECK(max_rel_diff(sr, vr, scale) < 1e-13);
        CHECK(max_rel_diff(si, vi, scale) < 1e-13);
      }
}
#endif

TEST_CASE("dispatch reports and switches backends") {
  const Backend start = active_backend();
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  CHECK(backend_name(Backend::Scalar) == "scalar");
  if (avx2_available()) {
    set_backend(Backend::Avx2);
    CHECK(active_backend() == Backend::Avx2);
  } else {
    CHECK_THROWS(set_backend(Backend::Avx2));
  }
  set_backend(start);
}

TEST_CASE("empty angle set and empty input") {
  std::vector<double> x{1.0, 2.0}, none, out;
  CHECK_NOTHROW(dtft(x, none, none, out, out));
  std::vector<double> ang{0.3}, r(1), i(1);
  dtft(none, none, ang, r, i);
  CHECK(r[0] == 0.0);
  CHECK(i[0] == 0.0);
}
