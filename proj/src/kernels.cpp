#include "cavity/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace cavity::kernels {

const char* backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_supported() {
#if defined(CAVITY_HAVE_AVX2_BUILD)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

std::atomic<int> g_forced{-1};  // -1 auto, else Backend value

Backend resolve() {
  int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Backend>(forced);
  if (const char* env = std::getenv("CAVITY_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!avx2_supported()) {
        throw std::runtime_error("CAVITY_KERNEL=avx2 but this build/CPU has no AVX2");
      }
      return Backend::Avx2;
    }
    if (std::strcmp(env, "auto") != 0) {
      throw std::runtime_error("CAVITY_KERNEL must be auto, scalar or avx2");
    }
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

Backend active_backend() { return resolve(); }

void force_backend(std::optional<Backend> b) {
  if (b && *b == Backend::Avx2 && !avx2_supported()) {
    throw std::runtime_error("force_backend: AVX2 not available");
  }
  g_forced.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

void residual_box(const FieldPtrs& in, const ResidualPtrs& out, int X, int Y, const Box& box,
                  const StencilParams& sp) {
#if defined(CAVITY_HAVE_AVX2_BUILD)
  if (resolve() == Backend::Avx2) {
    residual_box_avx2(in, out, X, Y, box, sp);
    return;
  }
#endif
  residual_box_scalar(in, out, X, Y, box, sp);
}

void update_box(double* q, const double* r, double dt, int X, int Y, const Box& box) {
#if defined(CAVITY_HAVE_AVX2_BUILD)
  if (resolve() == Backend::Avx2) {
    update_box_avx2(q, r, dt, X, Y, box);
    return;
  }
#endif
  update_box_scalar(q, r, dt, X, Y, box);
}

}  // namespace cavity::kernels
