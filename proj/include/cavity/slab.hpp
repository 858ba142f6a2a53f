#pragma once

#include <cstddef>
#include <vector>

#include "cavity/field.hpp"
#include "cavity/grid.hpp"

namespace cavity {

/// A contiguous copy of one or two node layers next to a block face,
/// transverse extent = interior nodes only (ghost corners never travel).
struct FaceSlab {
  Face face{};
  int depth = 0;                    // number of layers (1 or 2)
  std::array<int, 2> transverse{};  // interior extents of the two other axes
  std::vector<double> data;         // i-fastest over the box
};

/// Storage box of the `depth` outermost interior layers at `face`
/// (what a sender copies out).
Box face_interior_box(const Grid3& g, Face face, int depth);

/// Storage box of the `depth` ghost layers at `face` closest to the
/// interior (what a receiver writes into).
Box face_ghost_box(const Grid3& g, Face face, int depth);

/// Copies box contents to/from a flat buffer, i-fastest. `out`/`in` must
/// hold box.volume() doubles.
void copy_box_to(const Field3& f, const Box& box, double* out);
void copy_box_from(Field3& f, const Box& box, const double* in);

/// Extracts interior layers adjacent to `face` into a fresh slab.
FaceSlab extract_face_slab(const Field3& f, const Grid3& g, Face face, int depth);

/// Writes a slab received from the face-adjacent neighbour into this
/// block's ghost layers at `face`. Throws std::invalid_argument when the
/// slab's transverse extents do not match the grid.
void insert_face_slab(Field3& f, const Grid3& g, const FaceSlab& slab);

}  // namespace cavity
