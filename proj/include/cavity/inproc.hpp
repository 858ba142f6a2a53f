#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "cavity/transport.hpp"

namespace cavity::transport {

struct BusConfig {
  int np = 1;
  /// 0 = deliver sends immediately in posting order; nonzero seeds a
  /// deterministic per-rank shuffle of each flush batch (scheduling torture
  /// for the exchange logic — results must not depend on delivery order).
  std::uint64_t seed = 0;
  double timeout_ms = 20000.0;
  std::size_t max_queued = 1024;  // per channel; overflow means lost matches
};

/// Shared state for one group of thread-ranks: one FIFO channel per
/// (source, destination) pair plus a barrier. A rank that dies mid-run
/// poisons the bus so everyone else fails fast instead of timing out.
class InprocBus {
 public:
  explicit InprocBus(BusConfig cfg);

  int size() const { return cfg_.np; }
  const BusConfig& config() const { return cfg_; }

  void poison(int rank, const std::string& why);

 private:
  friend class InprocTransport;

  struct Message {
    int tag;
    Payload data;
  };
  struct Channel {
    std::mutex m;
    std::condition_variable cv;
    std::deque<Message> q;
  };

  Channel& channel(int src, int dst) {
    return *channels_[static_cast<std::size_t>(src) * static_cast<std::size_t>(cfg_.np) + static_cast<std::size_t>(dst)];
  }
  void check_poison();

  BusConfig cfg_;
  std::vector<std::unique_ptr<Channel>> channels_;

  std::mutex barrier_m_;
  std::condition_variable barrier_cv_;
  int barrier_count_ = 0;
  std::uint64_t barrier_gen_ = 0;

  std::mutex poison_m_;
  bool poisoned_ = false;
  std::string poison_why_;
};

/// Per-rank endpoint; one per worker thread.
class InprocTransport final : public Transport {
 public:
  InprocTransport(InprocBus& bus, int rank);

  int rank() const override { return rank_; }
  int world_size() const override { return bus_->size(); }

  Request post_send(int dest, int tag, Payload data) override;
  Request post_recv(int src, int tag, std::size_t capacity) override;
  std::vector<Payload> wait_all(std::span<const Request> reqs) override;
  void barrier() override;

 private:
  struct ReqState {
    bool is_recv = false;
    int peer = 0;
    int tag = 0;
    std::size_t capacity = 0;
    bool done = false;
    Payload data;
  };

  void flush_outbox();
  void deliver(std::size_t req_idx);
  Payload match_recv(ReqState& r);

  InprocBus* bus_;
  int rank_;
  std::vector<ReqState> reqs_;
  std::size_t outstanding_ = 0;
  std::vector<std::size_t> outbox_;  // send request ids not yet delivered
  bool randomized_ = false;
  std::mt19937_64 rng_;
};

}  // namespace cavity::transport
