#pragma once

#include <vector>

#include "cavity/decomp.hpp"
#include "cavity/grid.hpp"

namespace cavity {

/// Split of a block's interior for communication overlap: the internal part
/// needs no fresh ghosts (every stencil stays inside this block's own data),
/// the external shells next to block joins must wait for the exchange.
struct OverlapRegions {
  Box internal_box;
  std::vector<Box> external;  // disjoint, cover interior minus internal

  long long internal_cells() const { return internal_box.volume(); }
  long long external_cells() const {
    long long n = 0;
    for (const Box& b : external) n += b.volume();
    return n;
  }
};

/// Shrinks the interior by the ghost depth (2) on every face that has a
/// neighbour; wall faces keep their one-sided boundary data and need no
/// shrink. The peeled-off shells become the external boxes.
OverlapRegions compute_overlap_regions(const Grid3& block, const NeighborTable& table);

}  // namespace cavity
