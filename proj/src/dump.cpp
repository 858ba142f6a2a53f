#include "cavity/util/dump.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cavity/metrics.hpp"

namespace cavity {

namespace {

// File payloads are little-endian; swap on the (unlikely) big-endian host.
template <typename T>
T to_le(T v) {
  static_assert(sizeof(T) == 8);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    u = __builtin_bswap64(u);
    std::memcpy(&v, &u, 8);
  }
  return v;
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::big) {
    for (double d : v) {
      const double le = to_le(d);
      out.write(reinterpret_cast<const char*>(&le), 8);
    }
  } else {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * 8));
  }
}

void read_doubles(std::ifstream& in, std::vector<double>& v, std::size_t n) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 8));
  if (!in) throw std::runtime_error("solution file: truncated variable payload");
  if constexpr (std::endian::native == std::endian::big) {
    for (double& d : v) d = to_le(d);
  }
}

}  // namespace

void write_solution(const std::string& path, const GlobalFields& g) {
  metrics::note_io();
  const std::size_t n = g.nodes();
  for (const auto* f : {&g.p, &g.u, &g.v, &g.w, &g.t}) {
    if (f->size() != n) throw std::invalid_argument("solution dump: field size mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("solution dump: cannot open " + path);
  const std::int64_t header[6] = {to_le<std::int64_t>(g.size.nx), to_le<std::int64_t>(g.size.ny),
                                  to_le<std::int64_t>(g.size.nz), 0, 0, 0};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (const auto* f : {&g.p, &g.u, &g.v, &g.w, &g.t}) write_doubles(out, *f);
  if (!out) throw std::runtime_error("solution dump: write failed for " + path);
}

GlobalFields read_solution(const std::string& path) {
  metrics::note_io();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("solution file: cannot open " + path);
  std::int64_t header[6];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in) throw std::runtime_error("solution file: truncated header");
  GlobalFields g;
  g.size.nx = static_cast<int>(to_le(header[0]));
  g.size.ny = static_cast<int>(to_le(header[1]));
  g.size.nz = static_cast<int>(to_le(header[2]));
  if (g.size.nx <= 0 || g.size.ny <= 0 || g.size.nz <= 0) {
    throw std::runtime_error("solution file: bad grid size in header");
  }
  const std::size_t n = g.nodes();
  for (auto* f : {&g.p, &g.u, &g.v, &g.w, &g.t}) read_doubles(in, *f, n);
  return g;
}

}  // namespace cavity
