#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "cavity/kernels.hpp"

namespace cavity::kernels {

// Canonical per-cell residual evaluation. The vector backends mirror this
// operation order instruction for instruction; any change here must be
// reflected there or the backends stop agreeing bit for bit.
inline void residual_cell(const FieldPtrs& f, const ResidualPtrs& r, std::ptrdiff_t c,
                          std::ptrdiff_t sj, std::ptrdiff_t sk, const StencilParams& q) {
  const double* p = f.p;
  const double* u = f.u;
  const double* v = f.v;
  const double* w = f.w;
  const double* t = f.t;

  const double uc = u[c], vc = v[c], wc = w[c], tc = t[c];

  // local pseudo sound speed
  const double vmag = std::sqrt((uc * uc + vc * vc) + wc * wc);
  const double beta = std::max(vmag, q.u_ref);
  const double beta2 = beta * beta;

  // first derivatives, central
  const double dudx = (u[c + 1] - u[c - 1]) * q.inv2dx;
  const double dudy = (u[c + sj] - u[c - sj]) * q.inv2dy;
  const double dudz = (u[c + sk] - u[c - sk]) * q.inv2dz;
  const double dvdx = (v[c + 1] - v[c - 1]) * q.inv2dx;
  const double dvdy = (v[c + sj] - v[c - sj]) * q.inv2dy;
  const double dvdz = (v[c + sk] - v[c - sk]) * q.inv2dz;
  const double dwdx = (w[c + 1] - w[c - 1]) * q.inv2dx;
  const double dwdy = (w[c + sj] - w[c - sj]) * q.inv2dy;
  const double dwdz = (w[c + sk] - w[c - sk]) * q.inv2dz;
  const double dtdx = (t[c + 1] - t[c - 1]) * q.inv2dx;
  const double dtdy = (t[c + sj] - t[c - sj]) * q.inv2dy;
  const double dtdz = (t[c + sk] - t[c - sk]) * q.inv2dz;
  const double dpdx = (p[c + 1] - p[c - 1]) * q.inv2dx;
  const double dpdy = (p[c + sj] - p[c - sj]) * q.inv2dy;
  const double dpdz = (p[c + sk] - p[c - sk]) * q.inv2dz;

  // continuity: divergence plus fourth-difference pressure damping
  const double div = (dudx + dvdy) + dwdz;
  const double pc = p[c];
  const double d4x = ((((p[c - 2] - 4.0 * p[c - 1]) + 6.0 * pc) - 4.0 * p[c + 1]) + p[c + 2]) * q.invdx4;
  const double d4y = ((((p[c - 2 * sj] - 4.0 * p[c - sj]) + 6.0 * pc) - 4.0 * p[c + sj]) + p[c + 2 * sj]) * q.invdy4;
  const double d4z = ((((p[c - 2 * sk] - 4.0 * p[c - sk]) + 6.0 * pc) - 4.0 * p[c + sk]) + p[c + 2 * sk]) * q.invdz4;
  const double damp = beta * ((q.kdx3 * d4x + q.kdy3 * d4y) + q.kdz3 * d4z);
  r.p[c] = -beta2 * (q.rho * div + damp);

  // momentum: convection, pressure gradient, diffusion, buoyancy
  const double lap_u = ((u[c + 1] - 2.0 * uc) + u[c - 1]) * q.invdx2 +
                       ((u[c + sj] - 2.0 * uc) + u[c - sj]) * q.invdy2 +
                       ((u[c + sk] - 2.0 * uc) + u[c - sk]) * q.invdz2;
  const double lap_v = ((v[c + 1] - 2.0 * vc) + v[c - 1]) * q.invdx2 +
                       ((v[c + sj] - 2.0 * vc) + v[c - sj]) * q.invdy2 +
                       ((v[c + sk] - 2.0 * vc) + v[c - sk]) * q.invdz2;
  const double lap_w = ((w[c + 1] - 2.0 * wc) + w[c - 1]) * q.invdx2 +
                       ((w[c + sj] - 2.0 * wc) + w[c - sj]) * q.invdy2 +
                       ((w[c + sk] - 2.0 * wc) + w[c - sk]) * q.invdz2;
  const double conv_u = (uc * dudx + vc * dudy) + wc * dudz;
  const double conv_v = (uc * dvdx + vc * dvdy) + wc * dvdz;
  const double conv_w = (uc * dwdx + vc * dwdy) + wc * dwdz;
  const double buoy = q.sigma * (tc - q.t_inf);
  r.u[c] = ((-conv_u - q.inv_rho * dpdx) + q.nu * lap_u) + buoy * q.gx;
  r.v[c] = ((-conv_v - q.inv_rho * dpdy) + q.nu * lap_v) + buoy * q.gy;
  r.w[c] = ((-conv_w - q.inv_rho * dpdz) + q.nu * lap_w) + buoy * q.gz;

  // energy: convection and conduction
  const double lap_t = ((t[c + 1] - 2.0 * tc) + t[c - 1]) * q.invdx2 +
                       ((t[c + sj] - 2.0 * tc) + t[c - sj]) * q.invdy2 +
                       ((t[c + sk] - 2.0 * tc) + t[c - sk]) * q.invdz2;
  const double conv_t = (uc * dtdx + vc * dtdy) + wc * dtdz;
  r.t[c] = -conv_t + q.alpha * lap_t;
}

}  // namespace cavity::kernels
