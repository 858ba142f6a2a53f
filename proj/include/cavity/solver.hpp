#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "cavity/decomp.hpp"
#include "cavity/field.hpp"
#include "cavity/grid.hpp"
#include "cavity/kernels.hpp"
#include "cavity/util/repro_sum.hpp"

namespace cavity {

/// Fluid and case constants. Defaults give an air-like Ra = 1e5 cavity:
/// Pr = 0.71, a 5 cm box, and a 1 K hot/cold wall split around 300 K.
struct FluidParams {
  double rho = 1.0;         // density
  double nu = 1.5e-5;       // kinematic viscosity
  double alpha = 1.5e-5 / 0.71;  // thermal diffusivity
  double sigma = 0.0;       // buoyancy strength: force = sigma*(T - t_inf)*g
  std::array<double, 3> gravity{0.0, 0.0, -9.81};
  double u_ref = 0.03;      // floor for the local pseudo sound speed
  double kappa = 0.01;      // fourth-difference pressure damping strength
  double t_hot = 300.5;     // x-low wall temperature
  double t_cold = 299.5;    // x-high wall temperature
  double t_inf = 300.0;     // reference temperature (initial condition)
  double length = 0.05;     // cavity edge length, metres

  double gravity_mag() const;
  double rayleigh() const;  // |g|*sigma*(t_hot-t_cold)*L^3/(nu*alpha)

  /// Defaults with sigma back-solved so rayleigh() == ra.
  static FluidParams for_rayleigh(double ra);

  friend bool operator==(const FluidParams&, const FluidParams&) = default;
};

void validate_params(const FluidParams& p);

/// Pseudo-time marching controls.
struct SolverConfig {
  double cfl = 0.4;          // fraction of the stability limit
  long max_steps = 200000;   // cap for convergence-mode runs
  double conv_tol = 1e-8;    // relative residual-norm target
  bool rescale = true;       // pin p at the cavity centre each step
  int check_every = 10;      // convergence-check cadence, iterations

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Global L2 norms of the five equation residuals at one iteration.
struct ResidualNorms {
  long iteration = 0;
  std::array<double, 5> l2{};  // indexed by Var
  double max_component() const;
};

/// Which of the six faces are physical walls (the rest are block joins).
struct WallSet {
  std::array<bool, 6> wall{true, true, true, true, true, true};
  static WallSet all() { return {}; }
  static WallSet from_table(const NeighborTable& t);
  bool at(Face f) const { return wall[face_id(f)]; }
};

/// Local pseudo sound speed: max(|V|, u_ref). Must match the kernels'
/// per-cell arithmetic exactly.
inline double compute_beta(double u, double v, double w, double u_ref) {
  return std::max(std::sqrt((u * u + v * v) + w * w), u_ref);
}

/// Central fourth difference (f[-2]-4f[-1]+6f[0]-4f[+1]+f[+2])/h^4 along one
/// axis at node (i,j,k) in storage coordinates.
double fourth_difference(const Field3& f, Axis axis, int i, int j, int k, double h);

kernels::StencilParams make_stencil_params(const Grid3& g, const FluidParams& prm);

/// Steady-state residuals of all five equations over the whole interior, or
/// restricted to the given storage-coordinate boxes.
void compute_residual(const FieldSet& f, const FluidParams& prm, FieldSet& out);
void compute_residual(const FieldSet& f, const FluidParams& prm, std::span<const Box> boxes,
                      FieldSet& out);

/// Fills both ghost layers on every wall face: antisymmetric velocity
/// (no-slip), isothermal x walls / adiabatic y,z walls, cubic pressure
/// extrapolation. Block-join faces are left to the halo exchange.
void apply_boundary_conditions(FieldSet& f, const WallSet& walls, const FluidParams& prm);

/// Stability-limited pseudo-time step for this block (caller min-reduces
/// across ranks): cfl * min(axis CFL limits, viscous, thermal).
/// Throws std::invalid_argument for cfl <= 0 and std::runtime_error when a
/// field value is non-finite.
double compute_dt(const FieldSet& f, const FluidParams& prm, double cfl);

/// q += dt * residual for all five fields, interior only (or boxes).
void euler_step(FieldSet& f, const FieldSet& residuals, double dt);
void euler_step(FieldSet& f, const FieldSet& residuals, double dt, std::span<const Box> boxes);

/// Shifts the interior pressure by -p_center (fixes the additive gauge).
void rescale_pressure(FieldSet& f, double p_center);

/// L2 norms over this block's interior; exact accumulators so any block
/// split merges to the identical global result.
std::array<ReproSum, 5> residual_norm_partials(const FieldSet& residuals);

/// Serial convenience: norms over the whole (single-block) interior.
ResidualNorms residual_norm(const FieldSet& residuals);

/// Norms from merged partials: sqrt(sum / n_global) per equation.
ResidualNorms norms_from_partials(const std::array<ReproSum, 5>& sums, long long n_global,
                                  long iteration);

/// Quiescent initial condition: V = 0, p = 0, T = t_inf.
void initialize_fields(FieldSet& f, const FluidParams& prm);

}  // namespace cavity
