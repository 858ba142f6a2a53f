#include "cavity/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cavity {

double FluidParams::gravity_mag() const {
  return std::sqrt((gravity[0] * gravity[0] + gravity[1] * gravity[1]) + gravity[2] * gravity[2]);
}

double FluidParams::rayleigh() const {
  const double l3 = (length * length) * length;
  return gravity_mag() * sigma * (t_hot - t_cold) * l3 / (nu * alpha);
}

FluidParams FluidParams::for_rayleigh(double ra) {
  FluidParams p;
  const double l3 = (p.length * p.length) * p.length;
  p.sigma = ra * p.nu * p.alpha / (p.gravity_mag() * (p.t_hot - p.t_cold) * l3);
  return p;
}

void validate_params(const FluidParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("params: ") + name + " must be positive and finite");
    }
  };
  positive(p.rho, "rho");
  positive(p.nu, "nu");
  positive(p.alpha, "alpha");
  positive(p.u_ref, "u_ref");
  positive(p.length, "length");
  if (!(p.kappa >= 0.0) || !std::isfinite(p.kappa)) {
    throw std::invalid_argument("params: kappa must be >= 0");
  }
  for (double g : p.gravity) {
    if (!std::isfinite(g)) throw std::invalid_argument("params: gravity must be finite");
  }
  if (!std::isfinite(p.sigma) || !std::isfinite(p.t_hot) || !std::isfinite(p.t_cold) ||
      !std::isfinite(p.t_inf)) {
    throw std::invalid_argument("params: temperatures and sigma must be finite");
  }
  if (p.t_hot < p.t_cold) {
    throw std::invalid_argument("params: t_hot must be >= t_cold");
  }
}

double ResidualNorms::max_component() const {
  return *std::max_element(l2.begin(), l2.end());
}

WallSet WallSet::from_table(const NeighborTable& t) {
  WallSet s;
  for (int f = 0; f < 6; ++f) s.wall[static_cast<std::size_t>(f)] = t.rank_at[static_cast<std::size_t>(f)] == NeighborTable::kWall;
  return s;
}

double fourth_difference(const Field3& f, Axis axis, int i, int j, int k, double h) {
  std::ptrdiff_t s;
  switch (axis) {
    case Axis::I: s = 1; break;
    case Axis::J: s = f.ext_x(); break;
    default: s = static_cast<std::ptrdiff_t>(f.ext_x()) * f.ext_y(); break;
  }
  const double* d = f.data();
  const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(f.index(i, j, k));
  const double h2 = h * h;
  const double inv4 = 1.0 / (h2 * h2);
  return ((((d[c - 2 * s] - 4.0 * d[c - s]) + 6.0 * d[c]) - 4.0 * d[c + s]) + d[c + 2 * s]) * inv4;
}

kernels::StencilParams make_stencil_params(const Grid3& g, const FluidParams& prm) {
  kernels::StencilParams sp;
  sp.inv2dx = 1.0 / (2.0 * g.dx);
  sp.inv2dy = 1.0 / (2.0 * g.dy);
  sp.inv2dz = 1.0 / (2.0 * g.dz);
  sp.invdx2 = 1.0 / (g.dx * g.dx);
  sp.invdy2 = 1.0 / (g.dy * g.dy);
  sp.invdz2 = 1.0 / (g.dz * g.dz);
  const double dx2 = g.dx * g.dx, dy2 = g.dy * g.dy, dz2 = g.dz * g.dz;
  sp.invdx4 = 1.0 / (dx2 * dx2);
  sp.invdy4 = 1.0 / (dy2 * dy2);
  sp.invdz4 = 1.0 / (dz2 * dz2);
  sp.kdx3 = prm.kappa * (dx2 * g.dx);
  sp.kdy3 = prm.kappa * (dy2 * g.dy);
  sp.kdz3 = prm.kappa * (dz2 * g.dz);
  sp.u_ref = prm.u_ref;
  sp.nu = prm.nu;
  sp.alpha = prm.alpha;
  sp.rho = prm.rho;
  sp.inv_rho = 1.0 / prm.rho;
  sp.sigma = prm.sigma;
  sp.t_inf = prm.t_inf;
  sp.gx = prm.gravity[0];
  sp.gy = prm.gravity[1];
  sp.gz = prm.gravity[2];
  return sp;
}

void compute_residual(const FieldSet& f, const FluidParams& prm, FieldSet& out) {
  const Box whole = f.grid.interior_box();
  compute_residual(f, prm, std::span<const Box>(&whole, 1), out);
}

void compute_residual(const FieldSet& f, const FluidParams& prm, std::span<const Box> boxes,
                      FieldSet& out) {
  const kernels::StencilParams sp = make_stencil_params(f.grid, prm);
  const kernels::FieldPtrs in{f.p.data(), f.u.data(), f.v.data(), f.w.data(), f.t.data()};
  const kernels::ResidualPtrs res{out.p.data(), out.u.data(), out.v.data(), out.w.data(),
                                  out.t.data()};
  for (const Box& b : boxes) {
    if (b.empty()) continue;
    kernels::residual_box(in, res, f.grid.ext_x(), f.grid.ext_y(), b, sp);
  }
}

namespace {

// One wall of one face: fills both ghost layers from the interior values
// along the normal. g0 is the ghost node next to the wall, g1 the outer one;
// i0..i2 are the interior nodes walking away from the wall.
struct WallIdx {
  int g1, g0, i0, i1, i2;
};

WallIdx wall_indices(const Grid3& g, Face face) {
  const int n = g.interior(face.axis);
  if (face.side == Side::Low) {
    return {0, 1, 2, 3, 4};
  }
  return {n + 3, n + 2, n + 1, n, n - 1};
}

template <typename Fn>
void for_each_transverse(const Grid3& g, Face face, Fn&& fn) {
  // interior range of the two axes other than face.axis
  const Box b = g.interior_box();
  const int a = static_cast<int>(face.axis);
  const int a1 = a == 0 ? 1 : 0;
  const int a2 = a == 2 ? 1 : 2;
  std::array<int, 3> idx{};
  for (int q2 = b.lo[a2]; q2 < b.hi[a2]; ++q2) {
    for (int q1 = b.lo[a1]; q1 < b.hi[a1]; ++q1) {
      idx[a1] = q1;
      idx[a2] = q2;
      fn(idx);
    }
  }
}

}  // namespace

void apply_boundary_conditions(FieldSet& f, const WallSet& walls, const FluidParams& prm) {
  const Grid3& g = f.grid;
  for (int fid = 0; fid < 6; ++fid) {
    const Face face = face_from_id(fid);
    if (!walls.at(face)) continue;
    const WallIdx n = wall_indices(g, face);
    const int a = static_cast<int>(face.axis);

    const bool isothermal = face.axis == Axis::I;
    const double t_wall = face.side == Side::Low ? prm.t_hot : prm.t_cold;

    for_each_transverse(g, face, [&](std::array<int, 3> idx) {
      auto at = [&](Field3& q, int normal) -> double& {
        idx[a] = normal;
        return q.at(idx[0], idx[1], idx[2]);
      };
      // no-slip: velocity antisymmetric about the wall plane
      for (Field3* q : {&f.u, &f.v, &f.w}) {
        at(*q, n.g0) = -at(*q, n.i0);
        at(*q, n.g1) = -at(*q, n.i1);
      }
      if (isothermal) {
        at(f.t, n.g0) = 2.0 * t_wall - at(f.t, n.i0);
        at(f.t, n.g1) = 2.0 * t_wall - at(f.t, n.i1);
      } else {
        at(f.t, n.g0) = at(f.t, n.i0);
        at(f.t, n.g1) = at(f.t, n.i1);
      }
      // cubic extrapolation keeps the pressure stencil one-sided at walls
      at(f.p, n.g0) = (3.0 * at(f.p, n.i0) - 3.0 * at(f.p, n.i1)) + at(f.p, n.i2);
      at(f.p, n.g1) = (3.0 * at(f.p, n.g0) - 3.0 * at(f.p, n.i0)) + at(f.p, n.i1);
    });
  }
}

double compute_dt(const FieldSet& f, const FluidParams& prm, double cfl) {
  if (!(cfl > 0.0) || !std::isfinite(cfl)) {
    throw std::invalid_argument("compute_dt: cfl must be positive, got " + std::to_string(cfl));
  }
  const Grid3& g = f.grid;
  const Box b = g.interior_box();

  for (Var v : {Var::P, Var::U, Var::V, Var::W, Var::T}) {
    const Field3& q = f[v];
    for (int k = b.lo[2]; k < b.hi[2]; ++k) {
      for (int j = b.lo[1]; j < b.hi[1]; ++j) {
        for (int i = b.lo[0]; i < b.hi[0]; ++i) {
          if (!std::isfinite(q.at(i, j, k))) {
            throw std::runtime_error(std::string("compute_dt: non-finite value in field ") +
                                     var_name(v));
          }
        }
      }
    }
  }

  double conv = std::numeric_limits<double>::infinity();
  for (int k = b.lo[2]; k < b.hi[2]; ++k) {
    for (int j = b.lo[1]; j < b.hi[1]; ++j) {
      for (int i = b.lo[0]; i < b.hi[0]; ++i) {
        const double uc = f.u.at(i, j, k);
        const double vc = f.v.at(i, j, k);
        const double wc = f.w.at(i, j, k);
        const double beta = compute_beta(uc, vc, wc, prm.u_ref);
        conv = std::min(conv, g.dx / (std::abs(uc) + beta));
        conv = std::min(conv, g.dy / (std::abs(vc) + beta));
        conv = std::min(conv, g.dz / (std::abs(wc) + beta));
      }
    }
  }
  const double dmin = std::min({g.dx, g.dy, g.dz});
  const double visc = dmin * dmin / (6.0 * prm.nu);
  const double therm = dmin * dmin / (6.0 * prm.alpha);
  return cfl * std::min({conv, visc, therm});
}

void euler_step(FieldSet& f, const FieldSet& residuals, double dt) {
  const Box whole = f.grid.interior_box();
  euler_step(f, residuals, dt, std::span<const Box>(&whole, 1));
}

void euler_step(FieldSet& f, const FieldSet& residuals, double dt, std::span<const Box> boxes) {
  for (const Box& b : boxes) {
    if (b.empty()) continue;
    for (Var v : {Var::P, Var::U, Var::V, Var::W, Var::T}) {
      kernels::update_box(f[v].data(), residuals[v].data(), dt, f.grid.ext_x(), f.grid.ext_y(), b);
    }
  }
}

void rescale_pressure(FieldSet& f, double p_center) {
  const Box b = f.grid.interior_box();
  for (int k = b.lo[2]; k < b.hi[2]; ++k) {
    for (int j = b.lo[1]; j < b.hi[1]; ++j) {
      for (int i = b.lo[0]; i < b.hi[0]; ++i) {
        f.p.at(i, j, k) = f.p.at(i, j, k) - p_center;
      }
    }
  }
}

std::array<ReproSum, 5> residual_norm_partials(const FieldSet& residuals) {
  std::array<ReproSum, 5> sums;
  const Box b = residuals.grid.interior_box();
  for (int vi = 0; vi < kNumVars; ++vi) {
    const Field3& r = residuals[static_cast<Var>(vi)];
    ReproSum& s = sums[static_cast<std::size_t>(vi)];
    for (int k = b.lo[2]; k < b.hi[2]; ++k) {
      for (int j = b.lo[1]; j < b.hi[1]; ++j) {
        const double* row = r.data() + r.index(b.lo[0], j, k);
        const int n = b.hi[0] - b.lo[0];
        for (int i = 0; i < n; ++i) s.add(row[i] * row[i]);
      }
    }
  }
  return sums;
}

ResidualNorms norms_from_partials(const std::array<ReproSum, 5>& sums, long long n_global,
                                  long iteration) {
  ResidualNorms out;
  out.iteration = iteration;
  for (int vi = 0; vi < kNumVars; ++vi) {
    out.l2[static_cast<std::size_t>(vi)] =
        std::sqrt(sums[static_cast<std::size_t>(vi)].value() / static_cast<double>(n_global));
  }
  return out;
}

ResidualNorms residual_norm(const FieldSet& residuals) {
  const Box b = residuals.grid.interior_box();
  return norms_from_partials(residual_norm_partials(residuals), b.volume(), 0);
}

void initialize_fields(FieldSet& f, const FluidParams& prm) {
  f.p.fill(0.0);
  f.u.fill(0.0);
  f.v.fill(0.0);
  f.w.fill(0.0);
  f.t.fill(prm.t_inf);
}

}  // namespace cavity
