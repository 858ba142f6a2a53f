#include "cavity/field.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace cavity {

const char* var_name(Var v) {
  switch (v) {
    case Var::P: return "p";
    case Var::U: return "u";
    case Var::V: return "v";
    case Var::W: return "w";
    default: return "T";
  }
}

FieldSet allocate_fieldset(const Grid3& g) {
  validate_grid(g);
  // Guard the index arithmetic before touching the allocator: five fields of
  // (n+4)^3 doubles must stay addressable.
  unsigned __int128 cells = 1;
  for (Axis a : {Axis::I, Axis::J, Axis::K}) {
    cells *= static_cast<unsigned __int128>(g.interior(a)) + 2 * Grid3::ghost;
  }
  const unsigned __int128 limit =
      std::numeric_limits<std::size_t>::max() / (sizeof(double) * kNumVars);
  if (cells > limit) {
    throw std::length_error("fieldset: grid extents overflow addressable storage");
  }
  return FieldSet(g);
}

}  // namespace cavity
