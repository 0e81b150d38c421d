#include <atomic>
#include <cstdlib>
#include <cstring>

#include "rotorid/error.hpp"
#include "rotorid/kernels/dtft.hpp"

namespace rotorid::kernels {

namespace {

constexpr int kUnset = -1;
std::atomic<int> g_backend{kUnset};

Backend detect() {
  if (const char* env = std::getenv("ROTORID_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::Avx2;
  }
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(ROTORID_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() {
  int b = g_backend.load(std::memory_order_relaxed);
  if (b == kUnset) {
    b = static_cast<int>(detect());
    g_backend.store(b, std::memory_order_relaxed);
  }
  return static_cast<Backend>(b);
}

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available())
    fail(ErrorKind::Config, "AVX2 kernel not available on this machine");
  g_backend.store(static_cast<int>(b), std::memory_order_relaxed);
}

void dtft(std::span<const double> re, std::span<const double> im, std::span<const double> angles,
          std::span<double> out_re, std::span<double> out_im) {
  if (!im.empty() && im.size() != re.size()) fail(ErrorKind::Data, "dtft: re/im length mismatch");
  if (out_re.size() < angles.size() || out_im.size() < angles.size())
    fail(ErrorKind::Data, "dtft: output too small");
#if defined(ROTORID_BUILD_AVX2)
  if (active_backend() == Backend::Avx2) return dtft_avx2(re, im, angles, out_re, out_im);
#endif
  dtft_scalar(re, im, angles, out_re, out_im);
}

}  // namespace rotorid::kernels
