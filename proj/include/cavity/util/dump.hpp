#pragma once

#include <string>
#include <vector>

#include "cavity/grid.hpp"

namespace cavity {

/// The assembled global interior (no ghosts), i-fastest per variable.
struct GlobalFields {
  GridSize3 size{};
  std::vector<double> p, u, v, w, t;

  std::size_t nodes() const { return static_cast<std::size_t>(size.total()); }
  std::size_t node_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(size.nx) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(size.ny) * k);
  }
  friend bool operator==(const GlobalFields&, const GlobalFields&) = default;
};

/// Solution snapshot file: six little-endian int64 header words
/// (nx, ny, nz, 0, 0, 0) followed by p,u,v,w,T as little-endian doubles,
/// each the full global interior, i-fastest.
void write_solution(const std::string& path, const GlobalFields& g);
GlobalFields read_solution(const std::string& path);

}  // namespace cavity
