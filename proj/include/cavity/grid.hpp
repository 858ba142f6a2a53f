#pragma once

#include <array>
#include <cstddef>

namespace cavity {

enum class Axis : int { I = 0, J = 1, K = 2 };
enum class Side : int { Low = 0, High = 1 };

const char* axis_name(Axis a);

/// One of the six block faces, identified by axis and side.
struct Face {
  Axis axis{Axis::I};
  Side side{Side::Low};
  friend bool operator==(const Face&, const Face&) = default;
};

constexpr int face_id(Face f) { return 2 * static_cast<int>(f.axis) + static_cast<int>(f.side); }
constexpr Face face_from_id(int id) { return {static_cast<Axis>(id / 2), static_cast<Side>(id % 2)}; }
constexpr Face opposite(Face f) {
  return {f.axis, f.side == Side::Low ? Side::High : Side::Low};
}

/// Half-open cell range in local storage coordinates (ghosts included in the
/// coordinate system, i.e. the first interior node sits at index 2).
struct Box {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};

  long long volume() const {
    long long v = 1;
    for (int a = 0; a < 3; ++a) {
      if (hi[a] <= lo[a]) return 0;
      v *= hi[a] - lo[a];
    }
    return v;
  }
  bool empty() const { return volume() == 0; }
  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
  }
  friend bool operator==(const Box&, const Box&) = default;
};

/// Global interior node counts, no ghosts.
struct GridSize3 {
  int nx = 0, ny = 0, nz = 0;
  long long total() const { return 1LL * nx * ny * nz; }
  friend bool operator==(const GridSize3&, const GridSize3&) = default;
};

/// Structured uniform grid for one block: interior node counts plus node
/// spacing. Storage adds a fixed two-node ghost rim on every side; the
/// fourth-difference pressure stencil reaches two nodes along each axis,
/// everything else reaches one.
struct Grid3 {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;

  static constexpr int ghost = 2;

  int interior(Axis a) const { return a == Axis::I ? nx : (a == Axis::J ? ny : nz); }
  int ext(Axis a) const { return interior(a) + 2 * ghost; }
  int ext_x() const { return nx + 2 * ghost; }
  int ext_y() const { return ny + 2 * ghost; }
  int ext_z() const { return nz + 2 * ghost; }
  double spacing(Axis a) const { return a == Axis::I ? dx : (a == Axis::J ? dy : dz); }

  std::size_t cells() const {
    return static_cast<std::size_t>(ext_x()) * static_cast<std::size_t>(ext_y()) *
           static_cast<std::size_t>(ext_z());
  }
  /// Storage-coordinate box covering the interior nodes.
  Box interior_box() const { return Box{{ghost, ghost, ghost}, {nx + ghost, ny + ghost, nz + ghost}}; }

  friend bool operator==(const Grid3&, const Grid3&) = default;
};

/// Throws std::invalid_argument if extents are below the minimum the stencils
/// and the halo depth require (5 nodes per axis) or spacings are not positive
/// and finite.
void validate_grid(const Grid3& g);

/// Cavity grid covering [0,lx]x[0,ly]x[0,lz] with walls on the boundary
/// nodes; spacing is lx/(nx-1) per axis.
Grid3 make_cavity_grid(GridSize3 n, double lx, double ly, double lz);

}  // namespace cavity
