#include "cavity/runner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "cavity/inproc.hpp"
#include "cavity/overlap.hpp"

namespace cavity {

namespace {

Grid3 make_local_grid(const Grid3& global, const BlockExtent& e) {
  Grid3 g = global;
  g.nx = e.size(Axis::I);
  g.ny = e.size(Axis::J);
  g.nz = e.size(Axis::K);
  return g;
}

// norm partials travel as raw bit patterns inside the double payload
transport::Payload pack_partials(const std::array<ReproSum, 5>& sums) {
  transport::Payload out(5 * ReproSum::kSerializedWords);
  std::array<std::uint64_t, ReproSum::kSerializedWords> words;
  for (int v = 0; v < 5; ++v) {
    sums[static_cast<std::size_t>(v)].serialize(words.data());
    for (std::size_t n = 0; n < words.size(); ++n) {
      out[static_cast<std::size_t>(v) * ReproSum::kSerializedWords + n] =
          std::bit_cast<double>(words[n]);
    }
  }
  return out;
}

std::array<ReproSum, 5> unpack_partials(const transport::Payload& in) {
  std::array<ReproSum, 5> sums;
  std::array<std::uint64_t, ReproSum::kSerializedWords> words;
  for (int v = 0; v < 5; ++v) {
    for (std::size_t n = 0; n < words.size(); ++n) {
      words[n] = std::bit_cast<std::uint64_t>(
          in[static_cast<std::size_t>(v) * ReproSum::kSerializedWords + n]);
    }
    sums[static_cast<std::size_t>(v)] = ReproSum::deserialize(words.data());
  }
  return sums;
}

struct Shared {
  const RunConfig* cfg;
  const CaseOptions* opt;
  BlockMap map;
  Grid3 global_grid;
  transport::InprocBus bus;

  std::vector<ByteLedger> ledgers;
  std::vector<double> rank_seconds;
  std::vector<std::exception_ptr> errors;

  // written by rank 0 only
  long steps_marched = 0;
  bool converged = false;
  std::vector<ResidualNorms> history;
  std::optional<GlobalFields> fields;

  Shared(const RunConfig& c, const CaseOptions& o, BlockMap m, const Grid3& gg)
      : cfg(&c), opt(&o), map(std::move(m)), global_grid(gg),
        bus(transport::BusConfig{map.np(), c.seed, c.timeout_ms, 4096}),
        ledgers(static_cast<std::size_t>(map.np())),
        rank_seconds(static_cast<std::size_t>(map.np()), 0.0),
        errors(static_cast<std::size_t>(map.np())) {}
};

// Gathers sampled norms at rank 0, merges the exact partials and broadcasts
// the result, so every rank sees identical norm doubles.
ResidualNorms global_norms(const FieldSet& residuals, long long n_global, long iteration,
                           transport::Transport& tr) {
  const auto partials = residual_norm_partials(residuals);
  if (tr.world_size() == 1) return norms_from_partials(partials, n_global, iteration);

  const std::size_t count = 5 * ReproSum::kSerializedWords;
  auto gathered = transport::gather_payloads(
      tr, 0, pack_partials(partials), std::vector<std::size_t>(static_cast<std::size_t>(tr.world_size()), count));
  transport::Payload norms_payload(5);
  if (tr.rank() == 0) {
    std::array<ReproSum, 5> total = unpack_partials(gathered[0]);
    for (int r = 1; r < tr.world_size(); ++r) {
      const auto part = unpack_partials(gathered[static_cast<std::size_t>(r)]);
      for (int v = 0; v < 5; ++v) total[static_cast<std::size_t>(v)].merge(part[static_cast<std::size_t>(v)]);
    }
    const ResidualNorms n = norms_from_partials(total, n_global, iteration);
    for (int v = 0; v < 5; ++v) norms_payload[static_cast<std::size_t>(v)] = n.l2[static_cast<std::size_t>(v)];
  }
  norms_payload = transport::broadcast_payload(tr, 0, std::move(norms_payload), 5);
  ResidualNorms out;
  out.iteration = iteration;
  for (int v = 0; v < 5; ++v) out.l2[static_cast<std::size_t>(v)] = norms_payload[static_cast<std::size_t>(v)];
  return out;
}

void gather_fields(const FieldSet& f, const BlockMap& map, transport::Transport& tr,
                   std::optional<GlobalFields>& out) {
  const Box interior = f.grid.interior_box();
  const std::size_t block_nodes = static_cast<std::size_t>(interior.volume());
  transport::Payload mine(block_nodes * kNumVars);
  for (int v = 0; v < kNumVars; ++v) {
    copy_box_to(f[static_cast<Var>(v)], interior, mine.data() + static_cast<std::size_t>(v) * block_nodes);
  }

  std::vector<std::size_t> counts(static_cast<std::size_t>(map.np()));
  for (int r = 0; r < map.np(); ++r) {
    const BlockExtent& e = map.extent(r);
    counts[static_cast<std::size_t>(r)] =
        static_cast<std::size_t>(e.size(Axis::I)) * static_cast<std::size_t>(e.size(Axis::J)) *
        static_cast<std::size_t>(e.size(Axis::K)) * kNumVars;
  }
  auto parts = transport::gather_payloads(tr, 0, std::move(mine), counts);
  if (tr.rank() != 0) return;

  GlobalFields g;
  g.size = map.global;
  for (auto* field : {&g.p, &g.u, &g.v, &g.w, &g.t}) field->resize(g.nodes());
  for (int r = 0; r < map.np(); ++r) {
    const BlockExtent& e = map.extent(r);
    const transport::Payload& buf = parts[static_cast<std::size_t>(r)];
    const std::size_t nodes =
        static_cast<std::size_t>(e.size(Axis::I)) * static_cast<std::size_t>(e.size(Axis::J)) *
        static_cast<std::size_t>(e.size(Axis::K));
    std::vector<double>* fields[5] = {&g.p, &g.u, &g.v, &g.w, &g.t};
    for (int v = 0; v < kNumVars; ++v) {
      const double* src = buf.data() + static_cast<std::size_t>(v) * nodes;
      for (int k = e.lo[2]; k < e.hi[2]; ++k) {
        for (int j = e.lo[1]; j < e.hi[1]; ++j) {
          double* dst = fields[v]->data() + g.node_index(e.lo[0], j, k);
          const std::size_t row = static_cast<std::size_t>(e.size(Axis::I));
          std::copy(src, src + row, dst);
          src += row;
        }
      }
    }
  }
  out = std::move(g);
}

void rank_main(Shared& sh, int rank) {
  const RunConfig& cfg = *sh.cfg;
  const CaseOptions& opt = *sh.opt;
  transport::InprocTransport tr(sh.bus, rank);

  const BlockExtent& extent = sh.map.extent(rank);
  const Grid3 local = make_local_grid(sh.global_grid, extent);
  const NeighborTable table = sh.map.table(rank);
  const WallSet walls = WallSet::from_table(table);

  FieldSet fields = allocate_fieldset(local);
  FieldSet residuals = allocate_fieldset(local);
  initialize_fields(fields, cfg.fluid);

  ExchangePlan plan = build_plan(local, table, cfg.strategy);
  plan.corrupt_first = opt.corrupt_exchange;
  ByteLedger ledger;

  const OverlapRegions regions = compute_overlap_regions(local, table);
  const Box whole = local.interior_box();
  const long long n_global = sh.map.global.total();

  const bool fixed = cfg.steps >= 0;
  const long target = fixed ? cfg.steps : cfg.solver.max_steps;
  const int cadence = std::max(1, cfg.solver.check_every);
  const bool want_norms_hist = opt.collect_history || cfg.monitor_every > 0;

  std::array<double, 5> peaks{};
  bool converged = false;
  long it = 0;

  std::optional<metrics::TimedRegion> timer;
  double timed_seconds = 0.0;

  while (it < target) {
    ++it;
    if (it == 2) timer.emplace();  // iteration 1 is warm-up
    try {
      apply_boundary_conditions(fields, walls, cfg.fluid);
      if (cfg.overlap) {
        InFlight fl = exchange_begin(fields, plan, tr, &ledger);
        compute_residual(fields, cfg.fluid, std::span<const Box>(&regions.internal_box, 1),
                         residuals);
        exchange_finish(fl);
        compute_residual(fields, cfg.fluid, regions.external, residuals);
      } else {
        exchange(fields, plan, tr, &ledger);
        compute_residual(fields, cfg.fluid, residuals);
      }

      const bool check_now = (!fixed || want_norms_hist) && (it == 1 || it % cadence == 0);
      if (check_now) {
        const ResidualNorms norms = global_norms(residuals, n_global, it, tr);
        if (rank == 0) {
          sh.history.push_back(norms);
          if (cfg.monitor_every > 0 && it % cfg.monitor_every == 0) {
            std::printf("iter %8ld  |R|: p=%.3e u=%.3e v=%.3e w=%.3e T=%.3e\n", it, norms.l2[0],
                        norms.l2[1], norms.l2[2], norms.l2[3], norms.l2[4]);
          }
        }
        if (!fixed) {
          // identical doubles on every rank, so every rank decides alike
          double worst = 0.0;
          for (int v = 0; v < 5; ++v) {
            peaks[static_cast<std::size_t>(v)] = std::max(peaks[static_cast<std::size_t>(v)], norms.l2[static_cast<std::size_t>(v)]);
            if (peaks[static_cast<std::size_t>(v)] > 0.0) {
              worst = std::max(worst, norms.l2[static_cast<std::size_t>(v)] / peaks[static_cast<std::size_t>(v)]);
            }
          }
          converged = worst <= cfg.solver.conv_tol;
        }
      }

      const double dt_local = compute_dt(fields, cfg.fluid, cfg.solver.cfl);
      const double dt = transport::reduce_fixed_order(tr, transport::ReduceOp::Min, dt_local);
      euler_step(fields, residuals, dt, std::span<const Box>(&whole, 1));
      if (cfg.solver.rescale) {
        const double pc = center_pressure_broadcast(fields, sh.map, tr);
        rescale_pressure(fields, pc);
      }
      tr.barrier();  // keeps iteration tag spaces apart
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (converged) break;
  }

  if (timer) {
    timed_seconds = timer->seconds();
    timer.reset();
  }

  sh.rank_seconds[static_cast<std::size_t>(rank)] = timed_seconds;
  sh.ledgers[static_cast<std::size_t>(rank)] = ledger;
  if (rank == 0) {
    sh.steps_marched = it;
    sh.converged = converged;
  }
  if (opt.collect_fields || cfg.dump_fields) {
    gather_fields(fields, sh.map, tr, sh.fields);
  }
}

bool is_poison_echo(const std::exception& e) {
  return std::string(e.what()).find("transport aborted by") != std::string::npos;
}

}  // namespace

CaseResult run_case(const RunConfig& cfg, const CaseOptions& opt) {
  validate_params(cfg.fluid);
  if (cfg.np < 1 || cfg.np > 512) {
    throw std::invalid_argument("run: np must be in 1..512");
  }
  const DecompSpec spec = make_decomp_spec(cfg.np, cfg.mode, cfg.dims);
  const Grid3 global_grid =
      make_cavity_grid(cfg.grid, cfg.fluid.length, cfg.fluid.length, cfg.fluid.length);
  BlockMap map = make_block_map(cfg.grid, spec.dims);

  Shared sh(cfg, opt, std::move(map), global_grid);

  if (sh.map.np() == 1) {
    rank_main(sh, 0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(sh.map.np()));
    for (int r = 0; r < sh.map.np(); ++r) {
      threads.emplace_back([&sh, r] {
        try {
          rank_main(sh, r);
        } catch (...) {
          sh.errors[static_cast<std::size_t>(r)] = std::current_exception();
          try {
            throw;
          } catch (const std::exception& e) {
            sh.bus.poison(r, e.what());
          } catch (...) {
            sh.bus.poison(r, "unknown error");
          }
        }
      });
    }
    for (auto& t : threads) t.join();

    // prefer the root cause over "aborted by ..." echoes from other ranks
    std::exception_ptr first;
    for (const auto& err : sh.errors) {
      if (!err) continue;
      if (!first) first = err;
      try {
        std::rethrow_exception(err);
      } catch (const std::exception& e) {
        if (!is_poison_echo(e)) {
          first = err;
          break;
        }
      } catch (...) {
      }
    }
    if (first) std::rethrow_exception(first);
  }

  CaseResult out;
  out.steps_marched = sh.steps_marched;
  out.steps_timed = std::max(0L, sh.steps_marched - 1);
  out.converged = sh.converged;
  out.fields = std::move(sh.fields);
  out.history = std::move(sh.history);
  out.ledgers = std::move(sh.ledgers);

  metrics::RunRecord& rec = out.record;
  rec.np = sh.map.np();
  rec.mode = decomp_mode_name(cfg.mode);
  rec.dims = format_dims(sh.map.dims);
  rec.strategy = strategy_name(cfg.strategy);
  rec.overlap = cfg.overlap ? 1 : 0;
  rec.size = cfg.grid.total();
  rec.steps = out.steps_timed;
  rec.wall_time_s = *std::max_element(sh.rank_seconds.begin(), sh.rank_seconds.end());
  rec.ssspnt = (out.steps_timed > 0 && rec.wall_time_s > 0.0)
                   ? metrics::ssspnt(rec.size, out.steps_timed, rec.np, rec.wall_time_s)
                   : std::numeric_limits<double>::quiet_NaN();
  rec.speedup = std::numeric_limits<double>::quiet_NaN();
  rec.efficiency = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t bytes = 0;
  for (const auto& l : out.ledgers) bytes += l.bytes_sent;
  rec.bytes_sent = bytes;
  return out;
}

std::string VerifyReport::summary() const {
  const char* names[5] = {"p", "u", "v", "w", "T"};
  std::string s;
  char line[160];
  for (int v = 0; v < 5; ++v) {
    std::snprintf(line, sizeof line, "  %-2s max|diff| = %.3e   rel = %.3e\n", names[v],
                  max_abs[static_cast<std::size_t>(v)], rel[static_cast<std::size_t>(v)]);
    s += line;
  }
  std::snprintf(line, sizeof line, "verify: %s (tolerance %.1e, %ld steps)", pass ? "PASS" : "FAIL",
                tol, steps);
  s += line;
  return s;
}

VerifyReport compare_fields(const GlobalFields& ref, const GlobalFields& test, double tol) {
  if (ref.size != test.size) throw std::invalid_argument("verify: grid sizes differ");
  VerifyReport rep;
  rep.tol = tol;
  rep.pass = true;
  const std::vector<double>* a[5] = {&ref.p, &ref.u, &ref.v, &ref.w, &ref.t};
  const std::vector<double>* b[5] = {&test.p, &test.u, &test.v, &test.w, &test.t};
  for (int v = 0; v < 5; ++v) {
    double max_abs = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < a[v]->size(); ++n) {
      const double ra = (*a[v])[n];
      const double rb = (*b[v])[n];
      max_abs = std::max(max_abs, std::abs(ra - rb));
      scale = std::max({scale, std::abs(ra), std::abs(rb)});
    }
    rep.max_abs[static_cast<std::size_t>(v)] = max_abs;
    rep.rel[static_cast<std::size_t>(v)] = scale > 0.0 ? max_abs / scale : max_abs;
    if (!(rep.rel[static_cast<std::size_t>(v)] <= tol)) rep.pass = false;
  }
  return rep;
}

VerifyReport verify_against_serial(const RunConfig& cfg, bool corrupt_exchange) {
  if (cfg.steps < 0) {
    throw std::invalid_argument("verify: a fixed step count is required (--steps)");
  }
  CaseOptions opt;
  opt.collect_fields = true;
  opt.corrupt_exchange = corrupt_exchange;
  const CaseResult test = run_case(cfg, opt);

  RunConfig serial = cfg;
  serial.np = 1;
  serial.dims = Dims3{1, 1, 1};
  serial.overlap = false;
  serial.monitor_every = 0;
  const CaseResult ref = run_case(serial, CaseOptions{.collect_fields = true});

  VerifyReport rep = compare_fields(*ref.fields, *test.fields, cfg.verify_tol);
  rep.steps = cfg.steps;
  return rep;
}

}  // namespace cavity
