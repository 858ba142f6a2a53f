#include "cavity/decomp.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace cavity {

const char* decomp_mode_name(DecompMode m) {
  switch (m) {
    case DecompMode::OneDI: return "1d-i";
    case DecompMode::OneDJ: return "1d-j";
    case DecompMode::OneDK: return "1d-k";
    case DecompMode::TwoD: return "2d";
    default: return "3d";
  }
}

std::optional<DecompMode> parse_decomp_mode(const std::string& s) {
  if (s == "1d-i") return DecompMode::OneDI;
  if (s == "1d-j") return DecompMode::OneDJ;
  if (s == "1d-k") return DecompMode::OneDK;
  if (s == "2d") return DecompMode::TwoD;
  if (s == "3d") return DecompMode::ThreeD;
  return std::nullopt;
}

std::string format_dims(Dims3 d) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%dx%dx%d", d.pi, d.pj, d.pk);
  return buf;
}

std::optional<Dims3> parse_dims(const std::string& s) {
  Dims3 d;
  char extra;
  if (std::sscanf(s.c_str(), "%dx%dx%d%c", &d.pi, &d.pj, &d.pk, &extra) != 3) return std::nullopt;
  if (d.pi < 1 || d.pj < 1 || d.pk < 1) return std::nullopt;
  return d;
}

namespace {

std::vector<int> prime_factors_desc(int n) {
  std::vector<int> f;
  for (int p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  std::sort(f.begin(), f.end(), std::greater<int>());
  return f;
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

}  // namespace

Dims3 choose_dims(int np, DecompMode mode) {
  if (np < 1) throw std::invalid_argument("choose_dims: np must be >= 1");
  switch (mode) {
    case DecompMode::OneDI: return {np, 1, 1};
    case DecompMode::OneDJ: return {1, np, 1};
    case DecompMode::OneDK: return {1, 1, np};
    case DecompMode::TwoD: {
      if (np > 2 && is_prime(np)) {
        throw std::invalid_argument(
            "choose_dims: 2d cannot split a prime rank count " + std::to_string(np) +
            " into pencils; use 1d-k, or a composite np such as " + std::to_string(np - 1) +
            " or " + std::to_string(np + 1));
      }
      // most balanced pj <= pk with pj*pk = np
      int pj = 1;
      for (int d = 1; d * d <= np; ++d) {
        if (np % d == 0) pj = d;
      }
      return {1, pj, np / pj};
    }
    case DecompMode::ThreeD:
    default: {
      std::array<long long, 3> prod{1, 1, 1};
      for (int f : prime_factors_desc(np)) {
        auto it = std::min_element(prod.begin(), prod.end());
        *it *= f;
      }
      std::sort(prod.begin(), prod.end());
      return {static_cast<int>(prod[0]), static_cast<int>(prod[1]), static_cast<int>(prod[2])};
    }
  }
}

std::vector<BlockExtent> partition(GridSize3 global, Dims3 dims) {
  const std::array<int, 3> n{global.nx, global.ny, global.nz};
  const std::array<int, 3> p{dims.pi, dims.pj, dims.pk};
  for (int a = 0; a < 3; ++a) {
    if (p[a] < 1) throw std::invalid_argument("partition: block counts must be >= 1");
    if (n[a] < p[a]) {
      throw std::invalid_argument("partition: axis " + std::string(axis_name(static_cast<Axis>(a))) +
                                  " has fewer nodes than blocks");
    }
  }

  // Per-axis split: remainder nodes go to the lower-coordinate blocks, so
  // sizes along an axis differ by at most one node.
  std::array<std::vector<int>, 3> starts;
  for (int a = 0; a < 3; ++a) {
    const int base = n[a] / p[a];
    const int rem = n[a] % p[a];
    if (p[a] > 1 && base < 5) {
      throw std::invalid_argument(
          "partition: axis " + std::string(axis_name(static_cast<Axis>(a))) + ": " +
          std::to_string(n[a]) + " nodes over " + std::to_string(p[a]) + " blocks gives " +
          std::to_string(base) + "-node blocks; minimum is 5");
    }
    starts[a].resize(static_cast<std::size_t>(p[a]) + 1);
    int pos = 0;
    for (int c = 0; c <= p[a]; ++c) {
      starts[a][static_cast<std::size_t>(c)] = pos;
      if (c < p[a]) pos += base + (c < rem ? 1 : 0);
    }
  }

  std::vector<BlockExtent> out;
  out.reserve(static_cast<std::size_t>(dims.count()));
  for (int ck = 0; ck < p[2]; ++ck) {
    for (int cj = 0; cj < p[1]; ++cj) {
      for (int ci = 0; ci < p[0]; ++ci) {
        BlockExtent e;
        e.rank = coords_rank(dims, {ci, cj, ck});
        const std::array<int, 3> c{ci, cj, ck};
        for (int a = 0; a < 3; ++a) {
          e.lo[a] = starts[a][static_cast<std::size_t>(c[a])];
          e.hi[a] = starts[a][static_cast<std::size_t>(c[a]) + 1];
        }
        out.push_back(e);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BlockExtent& a, const BlockExtent& b) { return a.rank < b.rank; });
  return out;
}

std::array<int, 3> rank_coords(Dims3 dims, int rank) {
  if (rank < 0 || rank >= dims.count()) throw std::invalid_argument("rank out of range");
  return {rank % dims.pi, (rank / dims.pi) % dims.pj, rank / (dims.pi * dims.pj)};
}

int coords_rank(Dims3 dims, std::array<int, 3> c) {
  return c[0] + dims.pi * (c[1] + dims.pj * c[2]);
}

NeighborTable neighbors(Dims3 dims, int rank) {
  const auto c = rank_coords(dims, rank);
  NeighborTable t;
  for (int a = 0; a < 3; ++a) {
    const int pa = dims.along(static_cast<Axis>(a));
    for (int s = 0; s < 2; ++s) {
      auto nc = c;
      nc[a] += s == 0 ? -1 : 1;
      // no periodic wrap: the cavity has walls
      if (nc[a] < 0 || nc[a] >= pa) continue;
      t.rank_at[2 * a + s] = coords_rank(dims, nc);
    }
  }
  return t;
}

DecompSpec make_decomp_spec(int np, DecompMode mode, std::optional<Dims3> dims_override) {
  DecompSpec spec;
  spec.mode = mode;
  spec.np = np;
  if (dims_override) {
    if (dims_override->count() != np) {
      throw std::invalid_argument("decomp: dims " + format_dims(*dims_override) +
                                  " do not multiply to np=" + std::to_string(np));
    }
    spec.dims = *dims_override;
  } else {
    spec.dims = choose_dims(np, mode);
  }
  return spec;
}

std::array<int, 3> BlockMap::center_node() const {
  return {(global.nx - 1) / 2, (global.ny - 1) / 2, (global.nz - 1) / 2};
}

int BlockMap::owner_of(std::array<int, 3> node) const {
  for (const auto& e : extents) {
    if (node[0] >= e.lo[0] && node[0] < e.hi[0] && node[1] >= e.lo[1] && node[1] < e.hi[1] &&
        node[2] >= e.lo[2] && node[2] < e.hi[2]) {
      return e.rank;
    }
  }
  throw std::invalid_argument("block map: node outside the global interior");
}

BlockMap make_block_map(GridSize3 global, Dims3 dims) {
  BlockMap m;
  m.global = global;
  m.dims = dims;
  m.extents = partition(global, dims);
  return m;
}

namespace {

bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_int(int n) {
  int m = 0;
  while ((1 << m) < n) ++m;
  return m;
}

}  // namespace

GridSize3 grow_grid(GridSize3 base, int np, DecompMode mode, int growth_type) {
  if (growth_type != 1 && growth_type != 2) {
    throw std::invalid_argument("grow_grid: growth type must be 1 or 2");
  }
  if (!power_of_two(np)) {
    throw std::invalid_argument("grow_grid: np must be a power of two, got " + std::to_string(np));
  }
  const int m = log2_int(np);

  int fx = 1, fy = 1, fz = 1;
  if (growth_type == 1 || mode == DecompMode::ThreeD) {
    // round-robin doubling z, y, x — keeps the box as cubic as possible
    fz = 1 << ((m + 2) / 3);
    fy = 1 << ((m + 1) / 3);
    fx = 1 << (m / 3);
  } else {
    switch (mode) {
      case DecompMode::OneDI: fx = np; break;
      case DecompMode::OneDJ: fy = np; break;
      case DecompMode::OneDK: fz = np; break;
      case DecompMode::TwoD:
        fz = 1 << ((m + 1) / 2);
        fy = 1 << (m / 2);
        break;
      default: break;
    }
  }
  return {base.nx * fx, base.ny * fy, base.nz * fz};
}

}  // namespace cavity
