#include "cavity/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cavity/util/svg.hpp"

namespace cavity {

std::vector<metrics::RunRecord> BenchResult::all_rows() const {
  std::vector<metrics::RunRecord> rows;
  for (const auto& s : series) rows.insert(rows.end(), s.rows.begin(), s.rows.end());
  return rows;
}

BenchResult run_bench(const BenchSpec& spec) {
  if (spec.scaling != "strong" && spec.scaling != "weak") {
    throw std::invalid_argument("bench: scaling must be strong or weak");
  }
  if (spec.base.steps < 1) {
    throw std::invalid_argument("bench: a positive --steps is required");
  }
  BenchResult result;

  for (Strategy strat : spec.strategies) {
    for (DecompMode mode : spec.modes) {
      metrics::ScalingSeries series;
      series.label = std::string(strategy_name(strat)) + " " + decomp_mode_name(mode);
      series.scaling = spec.scaling;

      double t_serial = 0.0;
      double ssspnt_serial = 0.0;
      for (int np : spec.np_list) {
        RunConfig cfg = spec.base;
        cfg.np = np;
        cfg.mode = mode;
        cfg.dims.reset();
        cfg.strategy = strat;
        try {
          if (spec.scaling == "weak") {
            cfg.grid = grow_grid(spec.base.grid, np, mode, spec.base.growth_type);
          }
          const CaseResult r = run_case(cfg);
          metrics::RunRecord rec = r.record;
          if (np == 1) {
            t_serial = rec.wall_time_s;
            ssspnt_serial = rec.ssspnt;
          }
          if (t_serial > 0.0 && rec.wall_time_s > 0.0) {
            if (spec.scaling == "strong") {
              const auto [s, e] = metrics::speedup_efficiency(t_serial, rec.wall_time_s, np);
              rec.speedup = s;
              rec.efficiency = e;
            } else {
              // same work per rank: efficiency is the ssspnt ratio
              rec.efficiency = rec.ssspnt / ssspnt_serial;
              rec.speedup = rec.efficiency * static_cast<double>(np);
            }
          }
          series.rows.push_back(std::move(rec));
        } catch (const std::exception& e) {
          result.warnings.push_back(series.label + " np=" + std::to_string(np) +
                                    ": skipped (" + e.what() + ")");
        }
      }
      if (!series.rows.empty()) {
        series.validate();
        result.series.push_back(std::move(series));
      }
    }
  }
  return result;
}

std::vector<std::string> write_bench_outputs(const BenchResult& result, const std::string& out_dir,
                                             const std::string& scaling) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> paths;

  const std::string csv_path = out_dir + "/bench_" + scaling + ".csv";
  metrics::note_io();
  {
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw std::runtime_error("bench: cannot open " + csv_path);
    csv << metrics::csv_header() << "\n";
    for (const auto& s : result.series) {
      for (const auto& r : s.rows) csv << metrics::csv_row(r) << "\n";
    }
  }
  paths.push_back(csv_path);

  std::vector<svg::Series> plot_series;
  for (const auto& s : result.series) {
    svg::Series ps;
    ps.label = s.label;
    for (const auto& r : s.rows) {
      if (std::isfinite(r.ssspnt)) ps.points.push_back({static_cast<double>(r.np), r.ssspnt});
    }
    if (!ps.points.empty()) plot_series.push_back(std::move(ps));
  }
  svg::PlotSpec plot;
  plot.title = scaling + " scaling";
  plot.xlabel = "ranks";
  plot.ylabel = "ssspnt";
  plot.log2_x = true;
  const std::string svg_path = out_dir + "/bench_" + scaling + "_ssspnt.svg";
  svg::write_plot(svg_path, plot, plot_series);
  paths.push_back(svg_path);
  return paths;
}

std::vector<std::string> report_from_csv(const std::string& csv_path, const std::string& out_dir) {
  metrics::note_io();
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("report: cannot open " + csv_path);
  const auto rows = metrics::parse_csv(in);
  if (rows.empty()) throw std::runtime_error("report: no data rows in " + csv_path);

  // group rows back into (strategy, mode) series, preserving first-seen order
  std::vector<svg::Series> plot_series;
  std::vector<std::string> labels;
  for (const auto& r : rows) {
    const std::string label = r.strategy + " " + r.mode;
    std::size_t idx = labels.size();
    for (std::size_t n = 0; n < labels.size(); ++n) {
      if (labels[n] == label) {
        idx = n;
        break;
      }
    }
    if (idx == labels.size()) {
      labels.push_back(label);
      plot_series.push_back({label, {}});
    }
    if (std::isfinite(r.ssspnt)) {
      plot_series[idx].points.push_back({static_cast<double>(r.np), r.ssspnt});
    }
  }

  std::filesystem::create_directories(out_dir);
  svg::PlotSpec plot;
  plot.title = "scaling report";
  plot.xlabel = "ranks";
  plot.ylabel = "ssspnt";
  plot.log2_x = true;
  const std::string svg_path = out_dir + "/report_ssspnt.svg";
  svg::write_plot(svg_path, plot, plot_series);
  return {svg_path};
}

}  // namespace cavity
