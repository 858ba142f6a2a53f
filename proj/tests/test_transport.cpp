#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cavity/inproc.hpp"
#include "doctest.h"

using namespace cavity::transport;

namespace {

// Runs fn(rank, transport) on np threads over a fresh bus; rethrows the
// first worker exception in the main thread.
void run_ranks(BusConfig cfg, const std::function<void(int, InprocTransport&)>& fn) {
  InprocBus bus(cfg);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.np));
  for (int r = 0; r < cfg.np; ++r) {
    workers.emplace_back([&, r] {
      try {
        InprocTransport t(bus, r);
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

}  // namespace

TEST_CASE("round trip: payload arrives intact, aligned with its request") {
  run_ranks({.np = 2}, [](int rank, InprocTransport& t) {
    if (rank == 0) {
      const Request s = t.post_send(1, 7, {1.5, -2.5, 3.25});
      auto res = t.wait_all(std::array{s});
      CHECK(res.size() == 1);
      CHECK(res[0].empty());  // send slots complete with empty payloads
    } else {
      const Request r = t.post_recv(0, 7, 3);
      auto res = t.wait_all(std::array{r});
      REQUIRE(res.size() == 1);
      CHECK(res[0] == Payload{1.5, -2.5, 3.25});
    }
  });
}

TEST_CASE("messages with the same tag preserve posting order; tags match independently") {
  run_ranks({.np = 2}, [](int rank, InprocTransport& t) {
    if (rank == 0) {
      std::vector<Request> sends;
      sends.push_back(t.post_send(1, 4, {1.0}));
      sends.push_back(t.post_send(1, 4, {2.0}));
      sends.push_back(t.post_send(1, 9, {99.0}));
      sends.push_back(t.post_send(1, 4, {3.0}));
      t.wait_all(sends);
    } else {
      // post the odd-tag recv first: matching is by tag, not arrival order
      std::vector<Request> recvs;
      recvs.push_back(t.post_recv(0, 9, 1));
      recvs.push_back(t.post_recv(0, 4, 1));
      recvs.push_back(t.post_recv(0, 4, 1));
      recvs.push_back(t.post_recv(0, 4, 1));
      auto res = t.wait_all(recvs);
      CHECK(res[0] == Payload{99.0});
      CHECK(res[1] == Payload{1.0});  // FIFO within tag 4
      CHECK(res[2] == Payload{2.0});
      CHECK(res[3] == Payload{3.0});
    }
  });
}

TEST_CASE("randomized delivery still honours per-tag FIFO and tag matching") {
  for (std::uint64_t seed : {1ull, 42ull, 0xABCDEFull}) {
    run_ranks({.np = 3, .seed = seed}, [](int rank, InprocTransport& t) {
      if (rank == 0) {
        std::vector<Request> sends;
        for (int m = 0; m < 8; ++m) sends.push_back(t.post_send(1, 3, {double(m)}));
        for (int m = 0; m < 8; ++m) sends.push_back(t.post_send(2, 5, {double(10 + m)}));
        t.wait_all(sends);
      } else {
        const int tag = rank == 1 ? 3 : 5;
        const double base = rank == 1 ? 0.0 : 10.0;
        std::vector<Request> recvs;
        for (int m = 0; m < 8; ++m) recvs.push_back(t.post_recv(0, tag, 1));
        auto res = t.wait_all(recvs);
        for (int m = 0; m < 8; ++m) CHECK(res[static_cast<std::size_t>(m)] == Payload{base + m});
      }
    });
  }
}

TEST_CASE("oversized message fails the receiver with a clear error") {
  CHECK_THROWS_WITH_AS(
      run_ranks({.np = 2},
                [](int rank, InprocTransport& t) {
                  if (rank == 0) {
                    t.wait_all(std::array{t.post_send(1, 2, {1.0, 2.0, 3.0})});
                  } else {
                    t.wait_all(std::array{t.post_recv(0, 2, 2)});  // capacity 2 < 3
                  }
                }),
      doctest::Contains("capacity"), TransportError);
}

TEST_CASE("timeout names the waiting rank and the stuck (source, tag) pairs") {
  try {
    run_ranks({.np = 3, .timeout_ms = 80.0}, [](int rank, InprocTransport& t) {
      if (rank == 0) {
        // rank 1 never sends tag 11; rank 2 never sends at all
        std::vector<Request> recvs;
        recvs.push_back(t.post_recv(1, 11, 4));
        recvs.push_back(t.post_recv(2, 12, 4));
        t.wait_all(recvs);
      }
      // ranks 1 and 2 exit immediately
    });
    FAIL("expected TransportTimeout");
  } catch (const TransportTimeout& e) {
    const std::string what = e.what();
    CHECK(what.find("rank 0") != std::string::npos);
    CHECK(what.find("(src=1, tag=11)") != std::string::npos);
    CHECK(what.find("(src=2, tag=12)") != std::string::npos);
  }
}

TEST_CASE("barrier: no rank passes until all arrive") {
  std::atomic<int> arrived{0};
  std::atomic<bool> violated{false};
  run_ranks({.np = 4}, [&](int rank, InprocTransport& t) {
    for (int round = 0; round < 25; ++round) {
      if (rank == round % 4) {  // stagger one slow rank per round
        std::this_thread::sleep_for(std::chrono::microseconds(200));
      }
      arrived.fetch_add(1);
      t.barrier();
      // after the barrier, all four arrivals of this round must be in
      if (arrived.load() < 4 * (round + 1)) violated = true;
      t.barrier();
    }
  });
  CHECK(!violated.load());
}

TEST_CASE("a dead rank poisons the bus; survivors fail fast with the root cause") {
  try {
    run_ranks({.np = 2, .timeout_ms = 60000.0}, [](int rank, InprocTransport& t) {
      if (rank == 0) {
        throw std::runtime_error("rank 0 exploded");
      }
      t.wait_all(std::array{t.post_recv(0, 1, 8)});  // would hang for 60 s without poison
    });
    FAIL("expected an exception");
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const bool root_cause = what.find("rank 0 exploded") != std::string::npos;
    const bool echo = what.find("aborted") != std::string::npos;
    CHECK((root_cause || echo));
  }
}

TEST_CASE("broadcast copies the root payload to every rank") {
  run_ranks({.np = 4}, [](int rank, InprocTransport& t) {
    Payload mine = rank == 2 ? Payload{3.5, 4.5} : Payload{};
    const Payload got = broadcast_payload(t, 2, mine, 2);
    CHECK(got == Payload{3.5, 4.5});
    const double d = broadcast_double(t, 0, rank == 0 ? 7.25 : -1.0);
    CHECK(d == 7.25);
  });
}

TEST_CASE("fixed-order reduce combines ascending by rank and agrees everywhere") {
  run_ranks({.np = 4}, [](int rank, InprocTransport& t) {
    const double mine = 1.0 + rank;  // 1,2,3,4
    CHECK(reduce_fixed_order(t, ReduceOp::Sum, mine) == ((1.0 + 2.0) + 3.0) + 4.0);
    CHECK(reduce_fixed_order(t, ReduceOp::Min, mine) == 1.0);
    CHECK(reduce_fixed_order(t, ReduceOp::Max, mine) == 4.0);
  });
}

TEST_CASE("gather returns rank-indexed payloads at the root only") {
  run_ranks({.np = 3}, [](int rank, InprocTransport& t) {
    Payload mine(static_cast<std::size_t>(rank) + 1, double(rank));
    const std::vector<std::size_t> counts{1, 2, 3};
    auto all = gather_payloads(t, 0, mine, counts);
    if (rank == 0) {
      REQUIRE(all.size() == 3);
      CHECK(all[0] == Payload{0.0});
      CHECK(all[1] == Payload{1.0, 1.0});
      CHECK(all[2] == Payload{2.0, 2.0, 2.0});
    } else {
      CHECK(all.empty());
    }
  });
}

TEST_CASE("self-send completes within one rank") {
  run_ranks({.np = 1}, [](int, InprocTransport& t) {
    std::vector<Request> reqs;
    reqs.push_back(t.post_recv(0, 6, 2));
    reqs.push_back(t.post_send(0, 6, {8.0, 9.0}));
    auto res = t.wait_all(reqs);
    CHECK(res[0] == Payload{8.0, 9.0});
    CHECK(res[1].empty());
    // collectives degenerate cleanly
    CHECK(broadcast_double(t, 0, 5.5) == 5.5);
    CHECK(reduce_fixed_order(t, ReduceOp::Sum, 2.25) == 2.25);
  });
}

TEST_CASE("channel overflow is reported, not silently dropped") {
  CHECK_THROWS_AS(
      run_ranks({.np = 2, .timeout_ms = 500.0, .max_queued = 4},
                [](int rank, InprocTransport& t) {
                  if (rank == 0) {
                    std::vector<Request> sends;
                    for (int m = 0; m < 6; ++m) sends.push_back(t.post_send(1, 1, {double(m)}));
                    t.wait_all(sends);
                  }
                  t.barrier();
                  if (rank == 1) {
                    std::vector<Request> recvs;
                    for (int m = 0; m < 6; ++m) recvs.push_back(t.post_recv(0, 1, 1));
                    t.wait_all(recvs);
                  }
                }),
      TransportError);
}
