// AVX2 backend. Each arithmetic step mirrors residual_cell() in
// kernels_cell.hpp one intrinsic per operation, with no fused multiply-add,
// so results match the scalar backend bit for bit. Leftover cells at row
// ends go through residual_cell itself.

#include "kernels_cell.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace cavity::kernels {

namespace {

inline __m256d neg(__m256d x) {
  return _mm256_xor_pd(x, _mm256_set1_pd(-0.0));
}

}  // namespace

void residual_box_avx2(const FieldPtrs& in, const ResidualPtrs& out, int X, int Y, const Box& box,
                       const StencilParams& sp) {
  const std::ptrdiff_t sj = X;
  const std::ptrdiff_t sk = static_cast<std::ptrdiff_t>(X) * Y;
  const double* p = in.p;
  const double* u = in.u;
  const double* v = in.v;
  const double* w = in.w;
  const double* t = in.t;

  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d six = _mm256_set1_pd(6.0);
  const __m256d inv2dx = _mm256_set1_pd(sp.inv2dx);
  const __m256d inv2dy = _mm256_set1_pd(sp.inv2dy);
  const __m256d inv2dz = _mm256_set1_pd(sp.inv2dz);
  const __m256d invdx2 = _mm256_set1_pd(sp.invdx2);
  const __m256d invdy2 = _mm256_set1_pd(sp.invdy2);
  const __m256d invdz2 = _mm256_set1_pd(sp.invdz2);
  const __m256d invdx4 = _mm256_set1_pd(sp.invdx4);
  const __m256d invdy4 = _mm256_set1_pd(sp.invdy4);
  const __m256d invdz4 = _mm256_set1_pd(sp.invdz4);
  const __m256d kdx3 = _mm256_set1_pd(sp.kdx3);
  const __m256d kdy3 = _mm256_set1_pd(sp.kdy3);
  const __m256d kdz3 = _mm256_set1_pd(sp.kdz3);
  const __m256d uref = _mm256_set1_pd(sp.u_ref);
  const __m256d nu = _mm256_set1_pd(sp.nu);
  const __m256d alpha = _mm256_set1_pd(sp.alpha);
  const __m256d rho = _mm256_set1_pd(sp.rho);
  const __m256d inv_rho = _mm256_set1_pd(sp.inv_rho);
  const __m256d sigma = _mm256_set1_pd(sp.sigma);
  const __m256d tinf = _mm256_set1_pd(sp.t_inf);
  const __m256d gx = _mm256_set1_pd(sp.gx);
  const __m256d gy = _mm256_set1_pd(sp.gy);
  const __m256d gz = _mm256_set1_pd(sp.gz);

  const int width = box.hi[0] - box.lo[0];
  const int vec_end = box.lo[0] + (width & ~3);

  for (int k = box.lo[2]; k < box.hi[2]; ++k) {
    for (int j = box.lo[1]; j < box.hi[1]; ++j) {
      const std::ptrdiff_t row = sj * j + sk * k;
      std::ptrdiff_t c = row + box.lo[0];
      for (int i = box.lo[0]; i < vec_end; i += 4, c += 4) {
        const __m256d uc = _mm256_loadu_pd(u + c);
        const __m256d vc = _mm256_loadu_pd(v + c);
        const __m256d wc = _mm256_loadu_pd(w + c);
        const __m256d tc = _mm256_loadu_pd(t + c);

        const __m256d vmag = _mm256_sqrt_pd(_mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(uc, uc), _mm256_mul_pd(vc, vc)), _mm256_mul_pd(wc, wc)));
        const __m256d beta = _mm256_max_pd(vmag, uref);
        const __m256d beta2 = _mm256_mul_pd(beta, beta);

        const __m256d dudx = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(u + c + 1), _mm256_loadu_pd(u + c - 1)), inv2dx);
        const __m256d dudy = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(u + c + sj), _mm256_loadu_pd(u + c - sj)), inv2dy);
        const __m256d dudz = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(u + c + sk), _mm256_loadu_pd(u + c - sk)), inv2dz);
        const __m256d dvdx = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(v + c + 1), _mm256_loadu_pd(v + c - 1)), inv2dx);
        const __m256d dvdy = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(v + c + sj), _mm256_loadu_pd(v + c - sj)), inv2dy);
        const __m256d dvdz = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(v + c + sk), _mm256_loadu_pd(v + c - sk)), inv2dz);
        const __m256d dwdx = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(w + c + 1), _mm256_loadu_pd(w + c - 1)), inv2dx);
        const __m256d dwdy = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(w + c + sj), _mm256_loadu_pd(w + c - sj)), inv2dy);
        const __m256d dwdz = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(w + c + sk), _mm256_loadu_pd(w + c - sk)), inv2dz);
        const __m256d dtdx = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(t + c + 1), _mm256_loadu_pd(t + c - 1)), inv2dx);
        const __m256d dtdy = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(t + c + sj), _mm256_loadu_pd(t + c - sj)), inv2dy);
        const __m256d dtdz = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(t + c + sk), _mm256_loadu_pd(t + c - sk)), inv2dz);
        const __m256d dpdx = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(p + c + 1), _mm256_loadu_pd(p + c - 1)), inv2dx);
        const __m256d dpdy = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(p + c + sj), _mm256_loadu_pd(p + c - sj)), inv2dy);
        const __m256d dpdz = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(p + c + sk), _mm256_loadu_pd(p + c - sk)), inv2dz);

        const __m256d div = _mm256_add_pd(_mm256_add_pd(dudx, dvdy), dwdz);
        const __m256d pc = _mm256_loadu_pd(p + c);
        const __m256d d4x = _mm256_mul_pd(
            _mm256_add_pd(
                _mm256_sub_pd(
                    _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(p + c - 2),
                                                _mm256_mul_pd(four, _mm256_loadu_pd(p + c - 1))),
                                  _mm256_mul_pd(six, pc)),
                    _mm256_mul_pd(four, _mm256_loadu_pd(p + c + 1))),
                _mm256_loadu_pd(p + c + 2)),
            invdx4);
        const __m256d d4y = _mm256_mul_pd(
            _mm256_add_pd(
                _mm256_sub_pd(
                    _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(p + c - 2 * sj),
                                                _mm256_mul_pd(four, _mm256_loadu_pd(p + c - sj))),
                                  _mm256_mul_pd(six, pc)),
                    _mm256_mul_pd(four, _mm256_loadu_pd(p + c + sj))),
                _mm256_loadu_pd(p + c + 2 * sj)),
            invdy4);
        const __m256d d4z = _mm256_mul_pd(
            _mm256_add_pd(
                _mm256_sub_pd(
                    _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(p + c - 2 * sk),
                                                _mm256_mul_pd(four, _mm256_loadu_pd(p + c - sk))),
                                  _mm256_mul_pd(six, pc)),
                    _mm256_mul_pd(four, _mm256_loadu_pd(p + c + sk))),
                _mm256_loadu_pd(p + c + 2 * sk)),
            invdz4);
        const __m256d damp = _mm256_mul_pd(
            beta, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(kdx3, d4x), _mm256_mul_pd(kdy3, d4y)),
                                _mm256_mul_pd(kdz3, d4z)));
        _mm256_storeu_pd(out.p + c,
                         _mm256_mul_pd(neg(beta2), _mm256_add_pd(_mm256_mul_pd(rho, div), damp)));

        const __m256d lap_u = _mm256_add_pd(
            _mm256_add_pd(
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(u + c + 1), _mm256_mul_pd(two, uc)),
                                            _mm256_loadu_pd(u + c - 1)),
                              invdx2),
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(u + c + sj), _mm256_mul_pd(two, uc)),
                                            _mm256_loadu_pd(u + c - sj)),
                              invdy2)),
            _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(u + c + sk), _mm256_mul_pd(two, uc)),
                                        _mm256_loadu_pd(u + c - sk)),
                          invdz2));
        const __m256d lap_v = _mm256_add_pd(
            _mm256_add_pd(
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(v + c + 1), _mm256_mul_pd(two, vc)),
                                            _mm256_loadu_pd(v + c - 1)),
                              invdx2),
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(v + c + sj), _mm256_mul_pd(two, vc)),
                                            _mm256_loadu_pd(v + c - sj)),
                              invdy2)),
            _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(v + c + sk), _mm256_mul_pd(two, vc)),
                                        _mm256_loadu_pd(v + c - sk)),
                          invdz2));
        const __m256d lap_w = _mm256_add_pd(
            _mm256_add_pd(
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(w + c + 1), _mm256_mul_pd(two, wc)),
                                            _mm256_loadu_pd(w + c - 1)),
                              invdx2),
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(w + c + sj), _mm256_mul_pd(two, wc)),
                                            _mm256_loadu_pd(w + c - sj)),
                              invdy2)),
            _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(w + c + sk), _mm256_mul_pd(two, wc)),
                                        _mm256_loadu_pd(w + c - sk)),
                          invdz2));

        const __m256d conv_u = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(uc, dudx), _mm256_mul_pd(vc, dudy)), _mm256_mul_pd(wc, dudz));
        const __m256d conv_v = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(uc, dvdx), _mm256_mul_pd(vc, dvdy)), _mm256_mul_pd(wc, dvdz));
        const __m256d conv_w = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(uc, dwdx), _mm256_mul_pd(vc, dwdy)), _mm256_mul_pd(wc, dwdz));
        const __m256d buoy = _mm256_mul_pd(sigma, _mm256_sub_pd(tc, tinf));

        _mm256_storeu_pd(
            out.u + c,
            _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(neg(conv_u), _mm256_mul_pd(inv_rho, dpdx)),
                                        _mm256_mul_pd(nu, lap_u)),
                          _mm256_mul_pd(buoy, gx)));
        _mm256_storeu_pd(
            out.v + c,
            _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(neg(conv_v), _mm256_mul_pd(inv_rho, dpdy)),
                                        _mm256_mul_pd(nu, lap_v)),
                          _mm256_mul_pd(buoy, gy)));
        _mm256_storeu_pd(
            out.w + c,
            _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(neg(conv_w), _mm256_mul_pd(inv_rho, dpdz)),
                                        _mm256_mul_pd(nu, lap_w)),
                          _mm256_mul_pd(buoy, gz)));

        const __m256d lap_t = _mm256_add_pd(
            _mm256_add_pd(
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(t + c + 1), _mm256_mul_pd(two, tc)),
                                            _mm256_loadu_pd(t + c - 1)),
                              invdx2),
                _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(t + c + sj), _mm256_mul_pd(two, tc)),
                                            _mm256_loadu_pd(t + c - sj)),
                              invdy2)),
            _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(t + c + sk), _mm256_mul_pd(two, tc)),
                                        _mm256_loadu_pd(t + c - sk)),
                          invdz2));
        const __m256d conv_t = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(uc, dtdx), _mm256_mul_pd(vc, dtdy)), _mm256_mul_pd(wc, dtdz));
        _mm256_storeu_pd(out.t + c, _mm256_add_pd(neg(conv_t), _mm256_mul_pd(alpha, lap_t)));
      }
      for (int i = vec_end; i < box.hi[0]; ++i, ++c) {
        residual_cell(in, out, c, sj, sk, sp);
      }
    }
  }
}

void update_box_avx2(double* q, const double* r, double dt, int X, int Y, const Box& box) {
  const std::ptrdiff_t sj = X;
  const std::ptrdiff_t sk = static_cast<std::ptrdiff_t>(X) * Y;
  const __m256d vdt = _mm256_set1_pd(dt);
  const int width = box.hi[0] - box.lo[0];
  const int vec_end = box.lo[0] + (width & ~3);
  for (int k = box.lo[2]; k < box.hi[2]; ++k) {
    for (int j = box.lo[1]; j < box.hi[1]; ++j) {
      std::ptrdiff_t c = box.lo[0] + sj * j + sk * k;
      for (int i = box.lo[0]; i < vec_end; i += 4, c += 4) {
        _mm256_storeu_pd(q + c, _mm256_add_pd(_mm256_loadu_pd(q + c),
                                              _mm256_mul_pd(vdt, _mm256_loadu_pd(r + c))));
      }
      for (int i = vec_end; i < box.hi[0]; ++i, ++c) {
        q[c] = q[c] + dt * r[c];
      }
    }
  }
}

}  // namespace cavity::kernels

#endif  // __AVX2__
