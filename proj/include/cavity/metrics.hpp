#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace cavity::metrics {

/// Scaled size·steps per node·time: s * size * steps / (np * seconds) with
/// s = 1e-7. Throws std::invalid_argument for non-positive size, steps, np
/// or seconds.
double ssspnt(long long size, long steps, int np, double seconds, double s = 1e-7);

/// (speedup, efficiency) = (ts/tp, ts/(np*tp)).
std::pair<double, double> speedup_efficiency(double t_serial, double t_parallel, int np);

/// One benchmark/solve outcome; csv_row emits the columns in schema order.
struct RunRecord {
  int np = 1;
  std::string mode;      // decomposition mode name
  std::string dims;      // "PIxPJxPK"
  std::string strategy;  // exchange strategy name
  int overlap = 0;
  long long size = 0;    // global interior nodes
  long steps = 0;        // iterations inside the timed region
  double wall_time_s = 0.0;
  double ssspnt = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
  std::uint64_t bytes_sent = 0;  // summed over ranks, whole run
};

std::string csv_header();
std::string csv_row(const RunRecord& r);
/// Parses rows written by csv_row; validates the header line.
std::vector<RunRecord> parse_csv(std::istream& in);

/// Instrumentation guard: I/O inside any timed region is a bug (it would
/// pollute the scaling numbers). File writers call note_io(); the bench loop
/// wraps its timed section in a TimedRegion.
void note_io();
std::uint64_t io_violations();
void reset_io_violations();

class TimedRegion {
 public:
  TimedRegion();
  ~TimedRegion();
  TimedRegion(const TimedRegion&) = delete;
  TimedRegion& operator=(const TimedRegion&) = delete;
  double seconds() const;  // elapsed since construction

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Records that share one scaling protocol; validate() checks the sizes:
/// strong keeps the global size fixed, weak grows it in proportion to np.
struct ScalingSeries {
  std::string label;
  std::string scaling;  // "strong" | "weak"
  std::vector<RunRecord> rows;
  void validate() const;  // throws std::invalid_argument on violations
};

}  // namespace cavity::metrics
