#include "cavity/slab.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

namespace cavity {

namespace {

void check_depth(const Grid3& g, Face face, int depth) {
  if (depth < 1 || depth > Grid3::ghost) {
    throw std::invalid_argument("slab: depth must be 1.." + std::to_string(Grid3::ghost) +
                                ", got " + std::to_string(depth));
  }
  if (g.interior(face.axis) < depth) {
    throw std::invalid_argument("slab: block too thin for requested depth");
  }
}

// The transverse range is the interior of the two remaining axes; ghost
// corners are owned by no single neighbour and never travel.
Box face_box(const Grid3& g, Face face, int lo_normal, int hi_normal) {
  Box b = g.interior_box();
  int a = static_cast<int>(face.axis);
  b.lo[a] = lo_normal;
  b.hi[a] = hi_normal;
  return b;
}

}  // namespace

Box face_interior_box(const Grid3& g, Face face, int depth) {
  check_depth(g, face, depth);
  int n = g.interior(face.axis);
  if (face.side == Side::Low) {
    return face_box(g, face, Grid3::ghost, Grid3::ghost + depth);
  }
  return face_box(g, face, n + Grid3::ghost - depth, n + Grid3::ghost);
}

Box face_ghost_box(const Grid3& g, Face face, int depth) {
  check_depth(g, face, depth);
  int n = g.interior(face.axis);
  if (face.side == Side::Low) {
    return face_box(g, face, Grid3::ghost - depth, Grid3::ghost);
  }
  return face_box(g, face, n + Grid3::ghost, n + Grid3::ghost + depth);
}

void copy_box_to(const Field3& f, const Box& box, double* out) {
  const std::size_t row = static_cast<std::size_t>(box.hi[0] - box.lo[0]);
  for (int k = box.lo[2]; k < box.hi[2]; ++k) {
    for (int j = box.lo[1]; j < box.hi[1]; ++j) {
      // rows are contiguous in the i-fastest layout
      std::memcpy(out, f.data() + f.index(box.lo[0], j, k), row * sizeof(double));
      out += row;
    }
  }
}

void copy_box_from(Field3& f, const Box& box, const double* in) {
  const std::size_t row = static_cast<std::size_t>(box.hi[0] - box.lo[0]);
  for (int k = box.lo[2]; k < box.hi[2]; ++k) {
    for (int j = box.lo[1]; j < box.hi[1]; ++j) {
      std::memcpy(f.data() + f.index(box.lo[0], j, k), in, row * sizeof(double));
      in += row;
    }
  }
}

FaceSlab extract_face_slab(const Field3& f, const Grid3& g, Face face, int depth) {
  Box box = face_interior_box(g, face, depth);
  FaceSlab slab;
  slab.face = face;
  slab.depth = depth;
  int a = static_cast<int>(face.axis);
  int t = 0;
  for (int ax = 0; ax < 3; ++ax) {
    if (ax != a) slab.transverse[t++] = box.hi[ax] - box.lo[ax];
  }
  slab.data.resize(static_cast<std::size_t>(box.volume()));
  copy_box_to(f, box, slab.data.data());
  return slab;
}

void insert_face_slab(Field3& f, const Grid3& g, const FaceSlab& slab) {
  Box box = face_ghost_box(g, slab.face, slab.depth);
  int a = static_cast<int>(slab.face.axis);
  int t = 0;
  for (int ax = 0; ax < 3; ++ax) {
    if (ax == a) continue;
    int extent = box.hi[ax] - box.lo[ax];
    if (slab.transverse[t] != extent) {
      throw std::invalid_argument("slab: transverse extent mismatch (" +
                                  std::to_string(slab.transverse[t]) + " vs " +
                                  std::to_string(extent) + ")");
    }
    ++t;
  }
  if (slab.data.size() != static_cast<std::size_t>(box.volume())) {
    throw std::invalid_argument("slab: payload size does not match face box");
  }
  copy_box_from(f, box, slab.data.data());
}

}  // namespace cavity
