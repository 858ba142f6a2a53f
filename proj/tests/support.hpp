// Shared helpers for the multi-threaded tests: spawn one transport endpoint
// per rank, and deterministic field fillers keyed by global node ids.
#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "cavity/decomp.hpp"
#include "cavity/field.hpp"
#include "cavity/inproc.hpp"

namespace testsup {

/// Runs fn(rank, transport) on cfg.np threads over one fresh bus; rethrows
/// the first failure in the calling thread.
inline void run_ranks(cavity::transport::BusConfig cfg,
                      const std::function<void(int, cavity::transport::InprocTransport&)>& fn) {
  cavity::transport::InprocBus bus(cfg);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.np));
  for (int r = 0; r < cfg.np; ++r) {
    workers.emplace_back([&, r] {
      try {
        cavity::transport::InprocTransport t(bus, r);
        fn(r, t);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
        bus.poison(r, "worker threw");
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Injective value for (variable, global node): exact in a double, and both
/// producer and checker compute it with the identical expression, so
/// comparisons can be bitwise.
inline double global_value(cavity::Var v, int gi, int gj, int gk) {
  return ((static_cast<double>(static_cast<int>(v)) * 1000.0 + gi) * 100.0 + gj) * 100.0 + gk;
}

/// Fills a block's storage: interior nodes get global_value, every ghost
/// cell gets `sentinel`.
inline void fill_block(cavity::FieldSet& f, const cavity::BlockExtent& e, double sentinel) {
  const cavity::Grid3& g = f.grid;
  const cavity::Box ib = g.interior_box();
  for (cavity::Var v :
       {cavity::Var::P, cavity::Var::U, cavity::Var::V, cavity::Var::W, cavity::Var::T}) {
    cavity::Field3& q = f[v];
    for (int k = 0; k < g.ext_z(); ++k) {
      for (int j = 0; j < g.ext_y(); ++j) {
        for (int i = 0; i < g.ext_x(); ++i) {
          if (ib.contains(i, j, k)) {
            q.at(i, j, k) = global_value(v, e.lo[0] + i - 2, e.lo[1] + j - 2, e.lo[2] + k - 2);
          } else {
            q.at(i, j, k) = sentinel;
          }
        }
      }
    }
  }
}

}  // namespace testsup
