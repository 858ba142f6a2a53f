#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cavity/exchange.hpp"
#include "cavity/metrics.hpp"
#include "cavity/solver.hpp"
#include "cavity/util/config.hpp"
#include "cavity/util/dump.hpp"

namespace cavity {

struct CaseOptions {
  bool collect_fields = false;   // gather the global interior to rank 0
  bool collect_history = false;  // keep sampled residual norms even for fixed-step runs
  bool corrupt_exchange = false; // negative control: perturb one received halo value
};

struct CaseResult {
  metrics::RunRecord record;     // speedup/efficiency left NaN (needs a baseline)
  long steps_marched = 0;
  long steps_timed = 0;          // marched minus the warm-up iteration
  bool converged = false;
  std::optional<GlobalFields> fields;
  std::vector<ResidualNorms> history;  // convergence-check samples
  std::vector<ByteLedger> ledgers;     // indexed by rank
};

/// Runs one case: partitions the grid, spawns one thread per rank over an
/// in-process transport, marches cfg.steps iterations (or to convergence for
/// steps < 0) and gathers results. Serial and parallel runs of the same case
/// produce bitwise-identical fields.
CaseResult run_case(const RunConfig& cfg, const CaseOptions& opt = {});

struct VerifyReport {
  bool pass = false;
  double tol = 0.0;
  long steps = 0;
  std::array<double, 5> max_abs{};  // per variable, over the global interior
  std::array<double, 5> rel{};      // max_abs / max(|ref|,|test|) field scale
  std::string summary() const;      // one line per variable plus the verdict
};

VerifyReport compare_fields(const GlobalFields& ref, const GlobalFields& test, double tol);

/// Runs cfg as given, then the same physics on one rank, and compares the
/// final fields. cfg.steps must be >= 0 (a convergence run would compare
/// different iteration counts).
VerifyReport verify_against_serial(const RunConfig& cfg, bool corrupt_exchange = false);

}  // namespace cavity
