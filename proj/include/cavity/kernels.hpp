#pragma once

#include <optional>

#include "cavity/grid.hpp"

namespace cavity::kernels {

/// Precomputed per-run constants for the residual stencils. All divisions
/// happen once here; the kernels only multiply.
struct StencilParams {
  double inv2dx = 0, inv2dy = 0, inv2dz = 0;     // 1/(2h) central first differences
  double invdx2 = 0, invdy2 = 0, invdz2 = 0;     // 1/h^2 second differences
  double invdx4 = 0, invdy4 = 0, invdz4 = 0;     // 1/h^4 fourth differences
  double kdx3 = 0, kdy3 = 0, kdz3 = 0;           // kappa*h^3 damping weights
  double u_ref = 0;                              // pseudo-sound-speed floor
  double nu = 0, alpha = 0;                      // momentum/thermal diffusivity
  double rho = 0, inv_rho = 0;
  double sigma = 0, t_inf = 0;                   // buoyancy strength, reference temp
  double gx = 0, gy = 0, gz = 0;
};

struct FieldPtrs {
  const double *p, *u, *v, *w, *t;
};
struct ResidualPtrs {
  double *p, *u, *v, *w, *t;
};

enum class Backend { Scalar, Avx2 };
const char* backend_name(Backend b);

/// Backend picked for this process: CAVITY_KERNEL={auto,scalar,avx2} or a
/// test override via force_backend(); auto takes AVX2 when the CPU has it.
Backend active_backend();
void force_backend(std::optional<Backend> b);  // nullopt restores auto
bool avx2_supported();

/// Steady-state residuals of all five equations over `box` (storage
/// coordinates; the box must stay >= 2 nodes away from the storage edge).
/// X, Y are storage extents of the i and j axes.
void residual_box(const FieldPtrs& in, const ResidualPtrs& out, int X, int Y, const Box& box,
                  const StencilParams& sp);

/// q[c] += dt*r[c] over the box.
void update_box(double* q, const double* r, double dt, int X, int Y, const Box& box);

// Single-backend entry points, exposed for the equivalence tests.
void residual_box_scalar(const FieldPtrs& in, const ResidualPtrs& out, int X, int Y,
                         const Box& box, const StencilParams& sp);
void update_box_scalar(double* q, const double* r, double dt, int X, int Y, const Box& box);
#if defined(CAVITY_HAVE_AVX2_BUILD)
void residual_box_avx2(const FieldPtrs& in, const ResidualPtrs& out, int X, int Y, const Box& box,
                       const StencilParams& sp);
void update_box_avx2(double* q, const double* r, double dt, int X, int Y, const Box& box);
#endif

}  // namespace cavity::kernels
