#include "cavity/metrics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cavity::metrics {

double ssspnt(long long size, long steps, int np, double seconds, double s) {
  if (size <= 0) throw std::invalid_argument("ssspnt: size must be positive");
  if (steps <= 0) throw std::invalid_argument("ssspnt: steps must be positive");
  if (np <= 0) throw std::invalid_argument("ssspnt: np must be positive");
  if (!(seconds > 0.0)) throw std::invalid_argument("ssspnt: time must be positive");
  return s * static_cast<double>(size) * static_cast<double>(steps) /
         (static_cast<double>(np) * seconds);
}

std::pair<double, double> speedup_efficiency(double t_serial, double t_parallel, int np) {
  if (!(t_serial > 0.0) || !(t_parallel > 0.0)) {
    throw std::invalid_argument("speedup: times must be positive");
  }
  if (np <= 0) throw std::invalid_argument("speedup: np must be positive");
  const double s = t_serial / t_parallel;
  return {s, s / static_cast<double>(np)};
}

std::string csv_header() {
  return "np,mode,dims,strategy,overlap,size,steps,wall_time_s,ssspnt,speedup,efficiency,bytes_sent";
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string csv_row(const RunRecord& r) {
  std::string out;
  out += std::to_string(r.np) + ',';
  out += r.mode + ',';
  out += r.dims + ',';
  out += r.strategy + ',';
  out += std::to_string(r.overlap) + ',';
  out += std::to_string(r.size) + ',';
  out += std::to_string(r.steps) + ',';
  out += fmt_double(r.wall_time_s) + ',';
  out += fmt_double(r.ssspnt) + ',';
  out += fmt_double(r.speedup) + ',';
  out += fmt_double(r.efficiency) + ',';
  out += std::to_string(r.bytes_sent);
  return out;
}

std::vector<RunRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (line != csv_header()) throw std::runtime_error("csv: unexpected header: " + line);
  std::vector<RunRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) throw std::runtime_error("csv: bad row: " + line);
    RunRecord r;
    r.np = std::stoi(cells[0]);
    r.mode = cells[1];
    r.dims = cells[2];
    r.strategy = cells[3];
    r.overlap = std::stoi(cells[4]);
    r.size = std::stoll(cells[5]);
    r.steps = std::stol(cells[6]);
    r.wall_time_s = std::stod(cells[7]);
    r.ssspnt = std::stod(cells[8]);
    r.speedup = std::stod(cells[9]);
    r.efficiency = std::stod(cells[10]);
    r.bytes_sent = std::stoull(cells[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {
std::atomic<int> g_timed_depth{0};
std::atomic<std::uint64_t> g_io_violations{0};
}  // namespace

void note_io() {
  if (g_timed_depth.load(std::memory_order_relaxed) > 0) {
    g_io_violations.fetch_add(1, std::memory_order_relaxed);
  }
}

std::uint64_t io_violations() { return g_io_violations.load(std::memory_order_relaxed); }
void reset_io_violations() { g_io_violations.store(0, std::memory_order_relaxed); }

TimedRegion::TimedRegion() : start_(std::chrono::steady_clock::now()) {
  g_timed_depth.fetch_add(1, std::memory_order_relaxed);
}

TimedRegion::~TimedRegion() { g_timed_depth.fetch_sub(1, std::memory_order_relaxed); }

double TimedRegion::seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void ScalingSeries::validate() const {
  if (rows.empty()) return;
  if (scaling != "strong" && scaling != "weak") {
    throw std::invalid_argument("series: scaling must be strong or weak");
  }
  // anchor on the smallest np present
  const RunRecord* base = &rows.front();
  for (const auto& r : rows) {
    if (r.np < base->np) base = &r;
  }
  for (const auto& r : rows) {
    if (r.np <= 0) throw std::invalid_argument("series: np must be positive");
    if (scaling == "strong") {
      if (r.size != base->size) {
        throw std::invalid_argument("series: strong scaling must keep the global size fixed");
      }
    } else {
      // weak: work per rank constant
      if (r.size * base->np != base->size * r.np) {
        throw std::invalid_argument("series: weak scaling must grow size in proportion to np");
      }
    }
  }
}

}  // namespace cavity::metrics
