#pragma once

#include <cstddef>
#include <vector>

#include "cavity/grid.hpp"

namespace cavity {

/// Solved variables, in the order they are packed into exchange buffers.
enum class Var : int { P = 0, U = 1, V = 2, W = 3, T = 4 };
inline constexpr int kNumVars = 5;
const char* var_name(Var v);

/// Ghosted scalar field on a block grid. Storage is i-fastest:
///   idx = i + X*(j + Y*k), X = nx+4, Y = ny+4.
class Field3 {
 public:
  explicit Field3(const Grid3& g)
      : X_(g.ext_x()), Y_(g.ext_y()), Z_(g.ext_z()),
        data_(static_cast<std::size_t>(X_) * Y_ * Z_, 0.0) {}

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(X_) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(Y_) * k);
  }
  double& at(int i, int j, int k) { return data_[index(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[index(i, j, k)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  int ext_x() const { return X_; }
  int ext_y() const { return Y_; }
  int ext_z() const { return Z_; }

  void fill(double value) { data_.assign(data_.size(), value); }

 private:
  int X_, Y_, Z_;
  std::vector<double> data_;
};

/// The five fields of one block, plus the grid they live on.
struct FieldSet {
  Grid3 grid;
  Field3 p, u, v, w, t;

  explicit FieldSet(const Grid3& g) : grid(g), p(g), u(g), v(g), w(g), t(g) {}

  Field3& operator[](Var which) {
    switch (which) {
      case Var::P: return p;
      case Var::U: return u;
      case Var::V: return v;
      case Var::W: return w;
      default: return t;
    }
  }
  const Field3& operator[](Var which) const {
    return const_cast<FieldSet&>(*this)[which];
  }
};

/// Validates the grid, then allocates all five fields zero-initialised.
/// Throws std::invalid_argument for undersized grids and std::length_error
/// if the requested extents would overflow addressable storage.
FieldSet allocate_fieldset(const Grid3& g);

}  // namespace cavity
