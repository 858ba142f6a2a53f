#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cavity/decomp.hpp"
#include "cavity/exchange.hpp"
#include "cavity/solver.hpp"

namespace cavity {

/// Everything one run needs. The CLI builds this from flags; it can also be
/// saved to / loaded from a flat key=value file (round-trip lossless).
struct RunConfig {
  GridSize3 grid{32, 32, 32};
  int np = 1;
  DecompMode mode = DecompMode::ThreeD;
  std::optional<Dims3> dims;  // explicit block counts; unset = choose_dims
  Strategy strategy = Strategy::V3;
  bool overlap = false;
  int growth_type = 2;
  long steps = -1;  // >= 0: march exactly this many; -1: run to convergence
  FluidParams fluid = FluidParams::for_rayleigh(1e5);
  SolverConfig solver{};
  std::uint64_t seed = 0;
  double timeout_ms = 20000.0;
  int monitor_every = 0;  // print residual norms every N iterations (0 = off)
  std::string out_dir;
  bool dump_fields = false;
  double verify_tol = 1e-12;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Serialises every field as key=value lines, keys sorted, doubles printed
/// with enough digits to round-trip exactly.
std::string config_to_text(const RunConfig& c);

/// Parses config_to_text output (or a hand-written file): blank lines and
/// #-comments are skipped; unknown keys and malformed values throw
/// std::invalid_argument with the offending line.
RunConfig config_from_text(const std::string& text);

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& c);

}  // namespace cavity
