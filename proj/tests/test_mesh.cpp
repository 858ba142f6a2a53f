#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <stdexcept>
#include <vector>

#include "cavity/field.hpp"
#include "cavity/grid.hpp"
#include "cavity/slab.hpp"
#include "doctest.h"

using namespace cavity;

TEST_CASE("faces map to ids and back, opposite flips the side") {
  for (int id = 0; id < 6; ++id) {
    const Face f = face_from_id(id);
    CHECK(face_id(f) == id);
    CHECK(opposite(opposite(f)) == f);
    CHECK(opposite(f).axis == f.axis);
    CHECK(opposite(f).side != f.side);
  }
  CHECK(face_id(Face{Axis::I, Side::Low}) == 0);
  CHECK(face_id(Face{Axis::K, Side::High}) == 5);
}

TEST_CASE("box volume, emptiness and containment") {
  const Box b{{1, 2, 3}, {4, 5, 6}};
  CHECK(b.volume() == 27);
  CHECK(!b.empty());
  CHECK(b.contains(1, 2, 3));
  CHECK(b.contains(3, 4, 5));
  CHECK(!b.contains(4, 4, 5));  // hi is exclusive
  CHECK(Box{{2, 2, 2}, {2, 5, 5}}.empty());
  CHECK(Box{{3, 3, 3}, {2, 5, 5}}.volume() == 0);
}

TEST_CASE("grid storage layout: two ghost layers per side, interior starts at 2") {
  const Grid3 g = make_cavity_grid({8, 6, 5}, 0.05, 0.05, 0.05);
  CHECK(g.ext_x() == 12);
  CHECK(g.ext_y() == 10);
  CHECK(g.ext_z() == 9);
  CHECK(g.cells() == std::size_t{12 * 10 * 9});
  CHECK(g.interior_box() == Box{{2, 2, 2}, {10, 8, 7}});
  CHECK(g.dx == doctest::Approx(0.05 / 7).epsilon(1e-15));
  CHECK(g.dy == doctest::Approx(0.05 / 5).epsilon(1e-15));
  CHECK(g.dz == doctest::Approx(0.05 / 4).epsilon(1e-15));
}

TEST_CASE("field indexing is i-fastest over the ghosted extents") {
  const Grid3 g = make_cavity_grid({6, 5, 7}, 1.0, 1.0, 1.0);
  Field3 f(g);
  // oracle: idx = i + ext_x * (j + ext_y * k)
  CHECK(f.index(0, 0, 0) == 0);
  CHECK(f.index(1, 0, 0) == 1);
  CHECK(f.index(0, 1, 0) == std::size_t(g.ext_x()));
  CHECK(f.index(0, 0, 1) == std::size_t(g.ext_x()) * g.ext_y());
  CHECK(f.index(3, 4, 5) == std::size_t(3 + g.ext_x() * (4 + g.ext_y() * 5)));

  f.at(3, 4, 5) = 42.0;
  CHECK(f.data()[f.index(3, 4, 5)] == 42.0);
}

TEST_CASE("grid validation rejects degenerate extents and spacings") {
  CHECK_THROWS_AS(make_cavity_grid({4, 8, 8}, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_cavity_grid({8, 4, 8}, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_cavity_grid({8, 8, 1}, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_cavity_grid({8, 8, 8}, 0.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_cavity_grid({8, 8, 8}, -1.0, 1, 1), std::invalid_argument);
  CHECK_NOTHROW(make_cavity_grid({5, 5, 5}, 1, 1, 1));
}

TEST_CASE("fieldset allocates five zeroed fields and rejects absurd sizes") {
  const Grid3 g = make_cavity_grid({5, 6, 7}, 1, 1, 1);
  FieldSet fs = allocate_fieldset(g);
  CHECK(fs.p.data() != nullptr);
  CHECK(&fs[Var::P] == &fs.p);
  CHECK(&fs[Var::U] == &fs.u);
  CHECK(&fs[Var::V] == &fs.v);
  CHECK(&fs[Var::W] == &fs.w);
  CHECK(&fs[Var::T] == &fs.t);
  for (std::size_t c = 0; c < g.cells(); ++c) CHECK(fs.t.data()[c] == 0.0);

  Grid3 huge = g;
  huge.nx = huge.ny = huge.nz = 2'000'000;  // 8e18 cells -> must refuse, not crash
  CHECK_THROWS_AS(allocate_fieldset(huge), std::length_error);
}

namespace {

// Independent statement of the slab geometry: senders copy the `depth`
// outermost interior layers, receivers fill the `depth` ghost layers nearest
// the interior; transverse extents cover interior nodes only.
Box expected_interior_box(const Grid3& g, Face f, int depth) {
  Box b = g.interior_box();
  const int a = static_cast<int>(f.axis);
  const int n = g.interior(f.axis);
  if (f.side == Side::Low) {
    b.lo[a] = 2;
    b.hi[a] = 2 + depth;
  } else {
    b.lo[a] = n + 2 - depth;
    b.hi[a] = n + 2;
  }
  return b;
}

Box expected_ghost_box(const Grid3& g, Face f, int depth) {
  Box b = g.interior_box();
  const int a = static_cast<int>(f.axis);
  const int n = g.interior(f.axis);
  if (f.side == Side::Low) {
    b.lo[a] = 2 - depth;
    b.hi[a] = 2;
  } else {
    b.lo[a] = n + 2;
    b.hi[a] = n + 2 + depth;
  }
  return b;
}

}  // namespace

TEST_CASE("face slab boxes hug the face at the requested depth") {
  const Grid3 g = make_cavity_grid({7, 6, 5}, 1, 1, 1);
  for (int id = 0; id < 6; ++id) {
    const Face f = face_from_id(id);
    for (int depth = 1; depth <= 2; ++depth) {
      CAPTURE(id);
      CAPTURE(depth);
      const Box ib = face_interior_box(g, f, depth);
      const Box gb = face_ghost_box(g, f, depth);
      CHECK(ib == expected_interior_box(g, f, depth));
      CHECK(gb == expected_ghost_box(g, f, depth));
      // same shape, disjoint, and the ghost box lies outside the interior
      CHECK(ib.volume() == gb.volume());
      for (int a = 0; a < 3; ++a) {
        if (a != static_cast<int>(f.axis)) {
          CHECK(ib.lo[a] == gb.lo[a]);
          CHECK(ib.hi[a] == gb.hi[a]);
        }
      }
      const Box interior = g.interior_box();
      for (int k = gb.lo[2]; k < gb.hi[2]; ++k)
        for (int j = gb.lo[1]; j < gb.hi[1]; ++j)
          for (int i = gb.lo[0]; i < gb.hi[0]; ++i) CHECK(!interior.contains(i, j, k));
    }
  }
}

TEST_CASE("copy_box round-trips an arbitrary box") {
  const Grid3 g = make_cavity_grid({6, 7, 8}, 1, 1, 1);
  Field3 f(g);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (std::size_t c = 0; c < g.cells(); ++c) f.data()[c] = dist(rng);

  const Box box{{1, 2, 3}, {5, 6, 9}};
  std::vector<double> buf(static_cast<std::size_t>(box.volume()));
  copy_box_to(f, box, buf.data());

  Field3 f2(g);
  copy_box_from(f2, box, buf.data());
  for (int k = box.lo[2]; k < box.hi[2]; ++k)
    for (int j = box.lo[1]; j < box.hi[1]; ++j)
      for (int i = box.lo[0]; i < box.hi[0]; ++i) CHECK(f2.at(i, j, k) == f.at(i, j, k));
}

TEST_CASE("extract then insert restores a neighbour's ghost layers exactly") {
  const Grid3 g = make_cavity_grid({6, 5, 7}, 1, 1, 1);
  for (int id = 0; id < 6; ++id) {
    const Face f = face_from_id(id);
    for (int depth = 1; depth <= 2; ++depth) {
      Field3 src(g);
      for (int k = 0; k < g.ext_z(); ++k)
        for (int j = 0; j < g.ext_y(); ++j)
          for (int i = 0; i < g.ext_x(); ++i)
            src.at(i, j, k) = 1000.0 * id + 100.0 * depth + i + 0.01 * j + 0.0001 * k;

      FaceSlab slab = extract_face_slab(src, g, f, depth);
      CHECK(slab.depth == depth);
      CHECK(slab.face == f);
      const Box ib = face_interior_box(g, f, depth);
      CHECK(slab.data.size() == static_cast<std::size_t>(ib.volume()));

      // receiving block: the slab lands in the ghost layers of the *opposite*
      // face, matching values the sender held in its interior
      Field3 dst(g);
      FaceSlab incoming = slab;
      incoming.face = opposite(f);
      insert_face_slab(dst, g, incoming);
      const Box gb = face_ghost_box(g, opposite(f), depth);
      std::vector<double> got(static_cast<std::size_t>(gb.volume()));
      copy_box_to(dst, gb, got.data());
      for (std::size_t c = 0; c < got.size(); ++c) CHECK(got[c] == slab.data[c]);

      // nothing outside the ghost box was touched
      long long nonzero = 0;
      for (std::size_t c = 0; c < g.cells(); ++c) nonzero += dst.data()[c] != 0.0;
      CHECK(nonzero == gb.volume());
    }
  }
}

TEST_CASE("insert rejects slabs with mismatched transverse extents") {
  const Grid3 g = make_cavity_grid({6, 5, 7}, 1, 1, 1);
  Field3 f(g);
  FaceSlab slab = extract_face_slab(f, g, Face{Axis::J, Side::Low}, 1);
  slab.transverse[0] += 1;
  CHECK_THROWS_AS(insert_face_slab(f, g, slab), std::invalid_argument);
}
