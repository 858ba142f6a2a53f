#include "cavity/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cavity {

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::I: return "i";
    case Axis::J: return "j";
    default: return "k";
  }
}

void validate_grid(const Grid3& g) {
  // Two ghost layers per side plus a 5-point fourth difference need at least
  // 5 interior nodes along every axis.
  for (Axis a : {Axis::I, Axis::J, Axis::K}) {
    int n = g.interior(a);
    if (n < 5) {
      throw std::invalid_argument("grid: axis " + std::string(axis_name(a)) + " has " +
                                  std::to_string(n) + " nodes, minimum is 5");
    }
    double h = g.spacing(a);
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw std::invalid_argument("grid: spacing along " + std::string(axis_name(a)) +
                                  " must be positive and finite");
    }
  }
}

Grid3 make_cavity_grid(GridSize3 n, double lx, double ly, double lz) {
  if (n.nx < 2 || n.ny < 2 || n.nz < 2) {
    throw std::invalid_argument("grid: need at least 2 nodes per axis to define spacing");
  }
  Grid3 g;
  g.nx = n.nx;
  g.ny = n.ny;
  g.nz = n.nz;
  g.dx = lx / (n.nx - 1);
  g.dy = ly / (n.ny - 1);
  g.dz = lz / (n.nz - 1);
  validate_grid(g);
  return g;
}

}  // namespace cavity
