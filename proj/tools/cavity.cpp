// Command-line front end: solve a case, verify a parallel run against the
// serial solver, sweep a scaling benchmark, or re-plot a benchmark CSV.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavity/bench.hpp"
#include "cavity/kernels.hpp"
#include "cavity/runner.hpp"
#include "cavity/util/config.hpp"
#include "cavity/util/dump.hpp"

namespace {

using namespace cavity;

GridSize3 parse_grid_arg(const std::string& s) {
  GridSize3 g;
  char extra;
  if (std::sscanf(s.c_str(), "%dx%dx%d%c", &g.nx, &g.ny, &g.nz, &extra) == 3) return g;
  int n;
  if (std::sscanf(s.c_str(), "%d%c", &n, &extra) == 1) return {n, n, n};
  throw CLI::ValidationError("--grid", "expected N or NXxNYxNZ, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Case flags shared by solve and verify. Values are collected as optionals
// so a --config file can be loaded first and explicit flags win.
struct CaseFlags {
  std::optional<std::string> grid, mode, dims, strategy, config_file, out_dir;
  std::optional<int> np, monitor, check_every, growth;
  std::optional<long> steps, max_steps;
  std::optional<double> cfl, ra, u_ref, kappa, conv_tol, tol, timeout_ms;
  std::optional<std::uint64_t> seed;
  bool overlap = false;
  bool dump = false;
  bool no_rescale = false;
};

void add_case_flags(CLI::App* cmd, CaseFlags& f) {
  cmd->add_option("--grid", f.grid, "global grid: N (cube) or NXxNYxNZ");
  cmd->add_option("--np", f.np, "number of ranks");
  cmd->add_option("--mode", f.mode, "decomposition: 1d-i, 1d-j, 1d-k, 2d, 3d");
  cmd->add_option("--dims", f.dims, "explicit block counts PIxPJxPK (overrides --mode choice)");
  cmd->add_option("--strategy", f.strategy, "exchange strategy: baseline, v1, v2, v3");
  cmd->add_flag("--overlap", f.overlap, "overlap halo exchange with interior compute");
  cmd->add_option("--steps", f.steps, "march exactly N steps (omit to run to convergence)");
  cmd->add_option("--growth", f.growth, "weak-scaling growth schedule type (1 or 2)");
  cmd->add_option("--config", f.config_file, "load a key=value config file (flags override)");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "transport delivery-shuffle seed (0 = in order)");
  cmd->add_option("--monitor", f.monitor, "print residual norms every N iterations");
  cmd->add_flag("--dump", f.dump, "write the final solution snapshot");
  cmd->add_option("--cfl", f.cfl, "time step safety factor");
  cmd->add_option("--ra", f.ra, "Rayleigh number (re-derives buoyancy strength)");
  cmd->add_option("--u-ref", f.u_ref, "pseudo-sound-speed floor");
  cmd->add_option("--kappa", f.kappa, "pressure damping strength");
  cmd->add_option("--conv-tol", f.conv_tol, "relative residual convergence target");
  cmd->add_option("--max-steps", f.max_steps, "iteration cap for convergence runs");
  cmd->add_option("--check-every", f.check_every, "convergence check cadence");
  cmd->add_flag("--no-rescale", f.no_rescale, "do not pin centre pressure each step");
  cmd->add_option("--timeout-ms", f.timeout_ms, "transport receive/barrier timeout");
}

RunConfig build_config(const CaseFlags& f) {
  RunConfig c;
  if (f.config_file) c = load_config(*f.config_file);
  if (f.grid) c.grid = parse_grid_arg(*f.grid);
  if (f.np) c.np = *f.np;
  if (f.mode) {
    auto m = parse_decomp_mode(*f.mode);
    if (!m) throw CLI::ValidationError("--mode", "unknown mode '" + *f.mode + "'");
    c.mode = *m;
  }
  if (f.dims) {
    auto d = parse_dims(*f.dims);
    if (!d) throw CLI::ValidationError("--dims", "expected PIxPJxPK, got '" + *f.dims + "'");
    c.dims = *d;
  }
  if (f.strategy) {
    auto s = parse_strategy(*f.strategy);
    if (!s) throw CLI::ValidationError("--strategy", "unknown strategy '" + *f.strategy + "'");
    c.strategy = *s;
  }
  if (f.overlap) c.overlap = true;
  if (f.steps) c.steps = *f.steps;
  if (f.growth) c.growth_type = *f.growth;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.seed) {
    c.seed = *f.seed;
  } else if (const char* env = std::getenv("CAVITY_SEED")) {
    c.seed = std::strtoull(env, nullptr, 10);
  }
  if (f.monitor) c.monitor_every = *f.monitor;
  if (f.dump) c.dump_fields = true;
  if (f.cfl) c.solver.cfl = *f.cfl;
  if (f.ra) {
    FluidParams fresh = FluidParams::for_rayleigh(*f.ra);
    fresh.u_ref = c.fluid.u_ref;
    fresh.kappa = c.fluid.kappa;
    c.fluid = fresh;
  }
  if (f.u_ref) c.fluid.u_ref = *f.u_ref;
  if (f.kappa) c.fluid.kappa = *f.kappa;
  if (f.conv_tol) c.solver.conv_tol = *f.conv_tol;
  if (f.max_steps) c.solver.max_steps = *f.max_steps;
  if (f.check_every) c.solver.check_every = *f.check_every;
  if (f.no_rescale) c.solver.rescale = false;
  if (f.timeout_ms) c.timeout_ms = *f.timeout_ms;
  if (f.tol) c.verify_tol = *f.tol;
  return c;
}

void write_solve_outputs(const RunConfig& cfg, const CaseResult& r) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  save_config(cfg.out_dir + "/config.txt", cfg);
  {
    metrics::note_io();
    std::ofstream csv(cfg.out_dir + "/solve.csv", std::ios::trunc);
    csv << metrics::csv_header() << "\n" << metrics::csv_row(r.record) << "\n";
  }
  if (!r.history.empty()) {
    metrics::note_io();
    std::ofstream norms(cfg.out_dir + "/norms.csv", std::ios::trunc);
    norms << "iteration,res_p,res_u,res_v,res_w,res_T\n";
    for (const auto& n : r.history) {
      char line[200];
      std::snprintf(line, sizeof line, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", n.iteration,
                    n.l2[0], n.l2[1], n.l2[2], n.l2[3], n.l2[4]);
      norms << line;
    }
  }
  if (cfg.dump_fields && r.fields) {
    write_solution(cfg.out_dir + "/solution.bin", *r.fields);
  }
}

int cmd_solve(const CaseFlags& flags) {
  const RunConfig cfg = build_config(flags);
  CaseOptions opt;
  opt.collect_fields = cfg.dump_fields;
  opt.collect_history = !cfg.out_dir.empty() || cfg.monitor_every > 0;

  const CaseResult r = run_case(cfg, opt);

  std::printf("grid %dx%dx%d  ranks %d (%s, dims %s)  strategy %s%s  kernel %s\n", cfg.grid.nx,
              cfg.grid.ny, cfg.grid.nz, r.record.np, r.record.mode.c_str(), r.record.dims.c_str(),
              r.record.strategy.c_str(), cfg.overlap ? " +overlap" : "",
              kernels::backend_name(kernels::active_backend()));
  if (cfg.steps < 0) {
    std::printf("%s after %ld steps\n", r.converged ? "converged" : "NOT converged (hit max-steps)",
                r.steps_marched);
    if (!r.history.empty()) {
      const auto& n = r.history.back();
      std::printf("final |R|: p=%.3e u=%.3e v=%.3e w=%.3e T=%.3e\n", n.l2[0], n.l2[1], n.l2[2],
                  n.l2[3], n.l2[4]);
    }
  } else {
    std::printf("marched %ld steps\n", r.steps_marched);
  }
  if (r.steps_timed > 0) {
    std::printf("timed %ld steps in %.3f s   ssspnt %.3f   bytes sent %llu\n", r.steps_timed,
                r.record.wall_time_s, r.record.ssspnt,
                static_cast<unsigned long long>(r.record.bytes_sent));
  }
  write_solve_outputs(cfg, r);
  if (cfg.steps < 0 && !r.converged) return 3;
  return 0;
}

int cmd_verify(const CaseFlags& flags, bool corrupt) {
  RunConfig cfg = build_config(flags);
  if (cfg.steps < 0) cfg.steps = 100;
  const VerifyReport rep = verify_against_serial(cfg, corrupt);
  std::printf("parallel %d ranks (%s, %s%s) vs serial, %ld steps\n", cfg.np,
              decomp_mode_name(cfg.mode), strategy_name(cfg.strategy),
              cfg.overlap ? ", overlap" : "", cfg.steps);
  std::printf("%s\n", rep.summary().c_str());
  return rep.pass ? 0 : 2;
}

int cmd_bench(const CaseFlags& flags, const std::string& scaling, const std::string& np_csv,
              const std::string& strat_csv, const std::string& mode_csv) {
  BenchSpec spec;
  spec.scaling = scaling;
  spec.base = build_config(flags);
  if (spec.base.steps < 1) spec.base.steps = 50;
  if (spec.base.out_dir.empty()) spec.base.out_dir = "bench_out";

  spec.np_list.clear();
  for (const auto& s : split_list(np_csv)) spec.np_list.push_back(std::stoi(s));
  spec.strategies.clear();
  for (const auto& s : split_list(strat_csv)) {
    auto st = parse_strategy(s);
    if (!st) throw CLI::ValidationError("--strategy", "unknown strategy '" + s + "'");
    spec.strategies.push_back(*st);
  }
  spec.modes.clear();
  for (const auto& s : split_list(mode_csv)) {
    auto m = parse_decomp_mode(s);
    if (!m) throw CLI::ValidationError("--mode", "unknown mode '" + s + "'");
    spec.modes.push_back(*m);
  }

  const BenchResult result = run_bench(spec);
  std::printf("%s\n", metrics::csv_header().c_str());
  for (const auto& row : result.all_rows()) std::printf("%s\n", metrics::csv_row(row).c_str());
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const auto paths = write_bench_outputs(result, spec.base.out_dir, spec.scaling);
  for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
  if (metrics::io_violations() > 0) {
    std::fprintf(stderr, "error: file I/O detected inside a timed region\n");
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pressure-velocity cavity solver with pluggable halo exchange"};
  app.require_subcommand(1);

  CaseFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "run one case");
  add_case_flags(solve, solve_flags);

  CaseFlags verify_flags;
  bool corrupt = false;
  CLI::App* verify = app.add_subcommand("verify", "compare a parallel run against serial");
  add_case_flags(verify, verify_flags);
  verify->add_option("--tol", verify_flags.tol, "relative tolerance (default 1e-12)");
  verify->add_flag("--corrupt", corrupt, "perturb one halo message (verification must fail)");

  CaseFlags bench_flags;
  std::string scaling = "strong";
  std::string np_csv = "1,2,4,8";
  std::string strat_csv = "baseline,v1,v2,v3";
  std::string mode_csv = "3d";
  CLI::App* bench = app.add_subcommand("bench", "scaling sweep with CSV + SVG output");
  add_case_flags(bench, bench_flags);
  bench->add_option("--scaling", scaling, "strong or weak")
      ->check(CLI::IsMember({"strong", "weak"}));
  bench->get_option("--np")->description("ignored by bench; use --np-list");
  bench->add_option("--np-list", np_csv, "comma-separated rank counts");
  bench->get_option("--strategy")->description("ignored by bench; use --strategy-list");
  bench->add_option("--strategy-list", strat_csv, "comma-separated strategies");
  bench->get_option("--mode")->description("ignored by bench; use --mode-list");
  bench->add_option("--mode-list", mode_csv, "comma-separated decomposition modes");

  std::string report_csv, report_out = ".";
  CLI::App* report = app.add_subcommand("report", "re-plot a benchmark CSV");
  report->add_option("--csv", report_csv, "bench CSV to plot")->required();
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (verify->parsed()) return cmd_verify(verify_flags, corrupt);
    if (bench->parsed()) return cmd_bench(bench_flags, scaling, np_csv, strat_csv, mode_csv);
    if (report->parsed()) {
      for (const auto& p : report_from_csv(report_csv, report_out)) {
        std::printf("wrote %s\n", p.c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
