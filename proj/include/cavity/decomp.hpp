#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cavity/grid.hpp"

namespace cavity {

/// How ranks are arranged over the box: fixed-axis 1D slabs, 2D pencils
/// (x kept whole), or a full 3D brick decomposition.
enum class DecompMode { OneDI, OneDJ, OneDK, TwoD, ThreeD };

const char* decomp_mode_name(DecompMode m);
std::optional<DecompMode> parse_decomp_mode(const std::string& s);

/// Block counts along each axis; np = pi*pj*pk.
struct Dims3 {
  int pi = 1, pj = 1, pk = 1;
  int count() const { return pi * pj * pk; }
  int along(Axis a) const { return a == Axis::I ? pi : (a == Axis::J ? pj : pk); }
  friend bool operator==(const Dims3&, const Dims3&) = default;
};

std::string format_dims(Dims3 d);                       // "2x2x4"
std::optional<Dims3> parse_dims(const std::string& s);  // "PIxPJxPK"

/// Picks block counts for `np` ranks under the given mode.
///  - 1d-*: all blocks along the named axis.
///  - 2d:   x whole; np split into the most balanced pj <= pk pair.
///          Throws for prime np > 2, where no genuine pencil split exists.
///  - 3d:   prime factors of np distributed greedily (largest first) onto
///          the axis with the smallest running product; result is sorted
///          so pi <= pj <= pk.
Dims3 choose_dims(int np, DecompMode mode);

/// One rank's slice of the global interior, half-open node ranges in global
/// 0-based interior coordinates.
struct BlockExtent {
  int rank = 0;
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  int size(Axis a) const { return hi[static_cast<int>(a)] - lo[static_cast<int>(a)]; }
  friend bool operator==(const BlockExtent&, const BlockExtent&) = default;
};

/// Splits the global interior into dims.count() blocks, rank-ordered
/// i-fastest (rank = ci + pi*(cj + pj*ck)). Along each axis the remainder
/// nodes go to the lower-coordinate blocks, so sizes differ by at most one.
/// Throws std::invalid_argument if any block on a decomposed axis would end
/// up below 5 nodes.
std::vector<BlockExtent> partition(GridSize3 global, Dims3 dims);

/// Face-adjacent neighbour ranks; kWall marks a physical boundary.
struct NeighborTable {
  static constexpr int kWall = -1;
  std::array<int, 6> rank_at{kWall, kWall, kWall, kWall, kWall, kWall};
  int at(Face f) const { return rank_at[face_id(f)]; }
  bool is_wall(Face f) const { return at(f) == kWall; }
  friend bool operator==(const NeighborTable&, const NeighborTable&) = default;
};

std::array<int, 3> rank_coords(Dims3 dims, int rank);
int coords_rank(Dims3 dims, std::array<int, 3> c);
NeighborTable neighbors(Dims3 dims, int rank);

/// Decomposition request: mode, rank count and the resolved dims.
struct DecompSpec {
  DecompMode mode = DecompMode::ThreeD;
  int np = 1;
  Dims3 dims{};
  friend bool operator==(const DecompSpec&, const DecompSpec&) = default;
};

/// Resolves dims from (np, mode) or validates an explicit override.
DecompSpec make_decomp_spec(int np, DecompMode mode, std::optional<Dims3> dims_override = {});

/// Everything the solver needs to know about the global layout.
struct BlockMap {
  GridSize3 global{};
  Dims3 dims{};
  std::vector<BlockExtent> extents;

  int np() const { return dims.count(); }
  const BlockExtent& extent(int rank) const { return extents[static_cast<std::size_t>(rank)]; }
  NeighborTable table(int rank) const { return neighbors(dims, rank); }

  /// Global node at the numeric centre, component-wise floor((N-1)/2).
  std::array<int, 3> center_node() const;
  /// Rank whose extent contains the given global interior node.
  int owner_of(std::array<int, 3> node) const;
};

BlockMap make_block_map(GridSize3 global, Dims3 dims);

/// Scaled-up global grid for weak scaling with `np` ranks.
///
/// Type 1 grows the box the same way regardless of decomposition mode:
/// for np = 2^m the node counts multiply by
///   fz = 2^ceil(m/3), fy = 2^floor((m+1)/3), fx = 2^floor(m/3).
/// Type 2 grows only decomposed axes: 1d scales its own axis by np, 2d
/// scales (y,z) by 2^floor(m/2) / 2^ceil(m/2), 3d matches type 1.
/// Throws std::invalid_argument unless np is a power of two, or for an
/// unknown growth type.
GridSize3 grow_grid(GridSize3 base, int np, DecompMode mode, int growth_type);

/// A named weak-scaling protocol: base size plus growth type.
struct GrowthSchedule {
  int type = 2;
  GridSize3 base{32, 32, 32};
  GridSize3 size_for(int np, DecompMode mode) const { return grow_grid(base, np, mode, type); }
};

}  // namespace cavity
