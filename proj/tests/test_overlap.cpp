#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cstdint>
#include <vector>

#include "cavity/exchange.hpp"
#include "cavity/overlap.hpp"
#include "cavity/solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cavity;
using testsup::fill_block;
using testsup::run_ranks;

namespace {

NeighborTable table_from_mask(unsigned mask) {
  NeighborTable t;
  for (int f = 0; f < 6; ++f) {
    if (mask & (1u << f)) t.rank_at[static_cast<std::size_t>(f)] = 100 + f;
  }
  return t;
}

}  // namespace

TEST_CASE("no neighbours: everything is internal") {
  const Grid3 g = make_cavity_grid({8, 8, 8}, 0.05, 0.05, 0.05);
  const OverlapRegions r = compute_overlap_regions(g, NeighborTable{});
  CHECK(r.internal_box == g.interior_box());
  CHECK(r.external.empty());
  CHECK(r.internal_cells() == 512);
  CHECK(r.external_cells() == 0);
}

TEST_CASE("one joined face peels a two-layer shell") {
  const Grid3 g = make_cavity_grid({8, 8, 8}, 0.05, 0.05, 0.05);
  const OverlapRegions r = compute_overlap_regions(g, table_from_mask(1u << face_id(Face{Axis::K, Side::High})));
  CHECK(r.internal_cells() == 8 * 8 * 6);
  CHECK(r.external_cells() == 8 * 8 * 2);
  REQUIRE(r.external.size() == 1);
  CHECK(r.external[0] == Box{{2, 2, 8}, {10, 10, 10}});
  CHECK(r.internal_box == Box{{2, 2, 2}, {10, 10, 8}});
}

TEST_CASE("opposing joins on one axis peel both sides") {
  const Grid3 g = make_cavity_grid({8, 8, 8}, 0.05, 0.05, 0.05);
  const unsigned mask = (1u << face_id(Face{Axis::J, Side::Low})) |
                        (1u << face_id(Face{Axis::J, Side::High}));
  const OverlapRegions r = compute_overlap_regions(g, table_from_mask(mask));
  CHECK(r.internal_cells() == 8 * 4 * 8);
  CHECK(r.external_cells() == 8 * 4 * 8);
  CHECK(r.external.size() == 2);
}

TEST_CASE("all 64 neighbour topologies: disjoint cover with correct membership") {
  const Grid3 g = make_cavity_grid({8, 9, 10}, 0.05, 0.05, 0.05);
  const Box ib = g.interior_box();
  for (unsigned mask = 0; mask < 64; ++mask) {
    CAPTURE(mask);
    const NeighborTable table = table_from_mask(mask);
    const OverlapRegions r = compute_overlap_regions(g, table);

    // paint the interior: internal = 1, each external shell adds 2
    std::vector<int> paint(g.cells(), 0);
    Field3 tmp(g);  // borrow its indexer
    auto mark = [&](const Box& b, int inc) {
      for (int k = b.lo[2]; k < b.hi[2]; ++k)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
          for (int i = b.lo[0]; i < b.hi[0]; ++i) paint[tmp.index(i, j, k)] += inc;
    };
    mark(r.internal_box, 1);
    for (const Box& b : r.external) mark(b, 2);

    const std::array<int, 3> n{g.nx, g.ny, g.nz};
    for (int k = ib.lo[2]; k < ib.hi[2]; ++k)
      for (int j = ib.lo[1]; j < ib.hi[1]; ++j)
        for (int i = ib.lo[0]; i < ib.hi[0]; ++i) {
          // a cell must wait for the exchange iff it is within the ghost
          // depth (2) of some joined face
          const std::array<int, 3> idx{i, j, k};
          bool needs_halo = false;
          for (int fid = 0; fid < 6; ++fid) {
            const Face f = face_from_id(fid);
            if (table.is_wall(f)) continue;
            const int a = static_cast<int>(f.axis);
            if (f.side == Side::Low ? idx[a] < 2 + 2 : idx[a] >= n[a] + 2 - 2) needs_halo = true;
          }
          const int got = paint[tmp.index(i, j, k)];
          CAPTURE(i);
          CAPTURE(j);
          CAPTURE(k);
          REQUIRE(got == (needs_halo ? 2 : 1));  // covered exactly once, right side
        }
    CHECK(r.internal_cells() + r.external_cells() == ib.volume());
  }
}

TEST_CASE("minimum-size blocks collapse to an empty internal region") {
  const Grid3 g = make_cavity_grid({5, 5, 5}, 0.05, 0.05, 0.05);
  const unsigned joined_k = (1u << face_id(Face{Axis::K, Side::Low})) |
                            (1u << face_id(Face{Axis::K, Side::High}));
  const OverlapRegions r = compute_overlap_regions(g, table_from_mask(joined_k));
  CHECK(r.internal_cells() == 5 * 5 * 1);  // 5 - 2 - 2
  const OverlapRegions all = compute_overlap_regions(g, table_from_mask(63));
  CHECK(all.internal_cells() + all.external_cells() == 125);
  CHECK(all.internal_cells() == 1);
}

TEST_CASE("overlapped residual equals exchange-then-residual, bitwise") {
  // (2,2,2) split: every block has three joins and three walls
  const BlockMap map = make_block_map({12, 12, 12}, {2, 2, 2});
  const FluidParams prm = FluidParams::for_rayleigh(1e5);
  for (Strategy strat : {Strategy::Baseline, Strategy::V2, Strategy::V3}) {
    CAPTURE(strategy_name(strat));
    run_ranks({.np = 8}, [&](int rank, transport::InprocTransport& tr) {
      const BlockExtent& e = map.extent(rank);
      const Grid3 g = make_cavity_grid(
          {e.size(Axis::I), e.size(Axis::J), e.size(Axis::K)}, 0.05, 0.05, 0.05);

      FieldSet plain = allocate_fieldset(g);
      fill_block(plain, e, 0.25);  // finite junk in the wall ghosts is fine
      FieldSet lapped = allocate_fieldset(g);
      fill_block(lapped, e, 0.25);

      const NeighborTable table = map.table(rank);
      const ExchangePlan plan = build_plan(g, table, strat);
      const OverlapRegions regions = compute_overlap_regions(g, table);

      // path A: refresh ghosts, then one residual sweep over the interior
      FieldSet res_a = allocate_fieldset(g);
      exchange(plain, plan, tr, nullptr);
      compute_residual(plain, prm, res_a);

      // path B: residual on the internal box while messages are in flight,
      // then the external shells once ghosts landed
      FieldSet res_b = allocate_fieldset(g);
      InFlight fl = exchange_begin(lapped, plan, tr, nullptr);
      const std::array<Box, 1> inner{regions.internal_box};
      compute_residual(lapped, prm, inner, res_b);
      exchange_finish(fl);
      compute_residual(lapped, prm, regions.external, res_b);

      const Box ib = g.interior_box();
      for (Var v : {Var::P, Var::U, Var::V, Var::W, Var::T}) {
        for (int k = ib.lo[2]; k < ib.hi[2]; ++k)
          for (int j = ib.lo[1]; j < ib.hi[1]; ++j)
            for (int i = ib.lo[0]; i < ib.hi[0]; ++i) {
              CAPTURE(rank);
              CAPTURE(i);
              REQUIRE(std::bit_cast<std::uint64_t>(res_a[v].at(i, j, k)) ==
                      std::bit_cast<std::uint64_t>(res_b[v].at(i, j, k)));
            }
      }
    });
  }
}
