#include "kernels_cell.hpp"

namespace cavity::kernels {

void residual_box_scalar(const FieldPtrs& in, const ResidualPtrs& out, int X, int Y,
                         const Box& box, const StencilParams& sp) {
  const std::ptrdiff_t sj = X;
  const std::ptrdiff_t sk = static_cast<std::ptrdiff_t>(X) * Y;
  for (int k = box.lo[2]; k < box.hi[2]; ++k) {
    for (int j = box.lo[1]; j < box.hi[1]; ++j) {
      std::ptrdiff_t c = box.lo[0] + sj * j + sk * k;
      for (int i = box.lo[0]; i < box.hi[0]; ++i, ++c) {
        residual_cell(in, out, c, sj, sk, sp);
      }
    }
  }
}

void update_box_scalar(double* q, const double* r, double dt, int X, int Y, const Box& box) {
  const std::ptrdiff_t sj = X;
  const std::ptrdiff_t sk = static_cast<std::ptrdiff_t>(X) * Y;
  for (int k = box.lo[2]; k < box.hi[2]; ++k) {
    for (int j = box.lo[1]; j < box.hi[1]; ++j) {
      std::ptrdiff_t c = box.lo[0] + sj * j + sk * k;
      for (int i = box.lo[0]; i < box.hi[0]; ++i, ++c) {
        q[c] = q[c] + dt * r[c];
      }
    }
  }
}

}  // namespace cavity::kernels
