#include "cavity/overlap.hpp"

#include <algorithm>

namespace cavity {

OverlapRegions compute_overlap_regions(const Grid3& block, const NeighborTable& table) {
  OverlapRegions out;
  // Peel shells off the interior face by face; what remains is internal.
  // Peeling in face-id order keeps the shells disjoint (later shells shrink
  // in the axes already peeled).
  Box rest = block.interior_box();
  for (int fid = 0; fid < 6; ++fid) {
    const Face face = face_from_id(fid);
    if (table.is_wall(face)) continue;
    const int a = static_cast<int>(face.axis);
    const int depth = std::min(Grid3::ghost, rest.hi[a] - rest.lo[a]);
    if (depth <= 0) continue;
    Box shell = rest;
    if (face.side == Side::Low) {
      shell.hi[a] = rest.lo[a] + depth;
      rest.lo[a] += depth;
    } else {
      shell.lo[a] = rest.hi[a] - depth;
      rest.hi[a] -= depth;
    }
    if (!shell.empty()) out.external.push_back(shell);
  }
  out.internal_box = rest;
  return out;
}

}  // namespace cavity
