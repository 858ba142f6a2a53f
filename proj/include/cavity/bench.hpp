#pragma once

#include <string>
#include <vector>

#include "cavity/metrics.hpp"
#include "cavity/runner.hpp"
#include "cavity/util/config.hpp"

namespace cavity {

/// A scaling sweep: the cross product of strategies, decomposition modes and
/// rank counts, run either strong (fixed global grid) or weak (grid grown by
/// the growth schedule).
struct BenchSpec {
  std::string scaling = "strong";  // "strong" | "weak"
  std::vector<int> np_list{1, 2, 4, 8};
  std::vector<Strategy> strategies{Strategy::Baseline, Strategy::V1, Strategy::V2, Strategy::V3};
  std::vector<DecompMode> modes{DecompMode::ThreeD};
  RunConfig base;  // grid = base size; steps, physics, overlap, seed etc.
};

struct BenchResult {
  std::vector<metrics::ScalingSeries> series;  // one per (strategy, mode)
  std::vector<std::string> warnings;           // skipped points and why

  std::vector<metrics::RunRecord> all_rows() const;
};

/// Runs the sweep. Points whose decomposition is infeasible (prime np in 2d,
/// blocks under 5 nodes, non-power-of-two np under weak growth) are skipped
/// with a warning instead of aborting the sweep. Speedup/efficiency columns
/// are filled against the np=1 row of the same series when present.
BenchResult run_bench(const BenchSpec& spec);

/// Writes rows as CSV (schema from metrics::csv_header) plus an
/// ssspnt-vs-np SVG per sweep; returns the paths written.
std::vector<std::string> write_bench_outputs(const BenchResult& result, const std::string& out_dir,
                                             const std::string& scaling);

/// Rebuilds the SVG from a previously written CSV.
std::vector<std::string> report_from_csv(const std::string& csv_path, const std::string& out_dir);

}  // namespace cavity
