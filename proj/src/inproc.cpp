#include "cavity/inproc.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

namespace cavity::transport {

InprocBus::InprocBus(BusConfig cfg) : cfg_(cfg) {
  if (cfg_.np < 1) throw std::invalid_argument("bus: np must be >= 1");
  channels_.resize(static_cast<std::size_t>(cfg_.np) * static_cast<std::size_t>(cfg_.np));
  for (auto& c : channels_) c = std::make_unique<Channel>();
}

void InprocBus::poison(int rank, const std::string& why) {
  {
    std::lock_guard lock(poison_m_);
    if (!poisoned_) {
      poisoned_ = true;
      poison_why_ = "rank " + std::to_string(rank) + ": " + why;
    }
  }
  for (auto& c : channels_) {
    std::lock_guard lock(c->m);
    c->cv.notify_all();
  }
  std::lock_guard lock(barrier_m_);
  barrier_cv_.notify_all();
}

void InprocBus::check_poison() {
  std::lock_guard lock(poison_m_);
  if (poisoned_) {
    throw TransportError("transport aborted by " + poison_why_);
  }
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, int rank) {
  // splitmix64 step keeps per-rank streams decorrelated
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(rank + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

InprocTransport::InprocTransport(InprocBus& bus, int rank)
    : bus_(&bus), rank_(rank), randomized_(bus.config().seed != 0),
      rng_(mix_seed(bus.config().seed, rank)) {
  if (rank < 0 || rank >= bus.size()) throw std::invalid_argument("transport: rank out of range");
}

Request InprocTransport::post_send(int dest, int tag, Payload data) {
  if (dest < 0 || dest >= bus_->size()) throw TransportError("post_send: bad destination rank");
  if (tag < 0) throw TransportError("post_send: negative tag");
  reqs_.push_back({false, dest, tag, 0, false, std::move(data)});
  ++outstanding_;
  const std::size_t id = reqs_.size() - 1;
  outbox_.push_back(id);
  if (!randomized_) flush_outbox();
  return Request{id};
}

Request InprocTransport::post_recv(int src, int tag, std::size_t capacity) {
  if (src < 0 || src >= bus_->size()) throw TransportError("post_recv: bad source rank");
  if (tag < 0) throw TransportError("post_recv: negative tag");
  reqs_.push_back({true, src, tag, capacity, false, {}});
  ++outstanding_;
  return Request{reqs_.size() - 1};
}

void InprocTransport::deliver(std::size_t req_idx) {
  ReqState& r = reqs_[req_idx];
  auto& ch = bus_->channel(rank_, r.peer);
  {
    std::lock_guard lock(ch.m);
    if (ch.q.size() >= bus_->config().max_queued) {
      throw TransportError("channel " + std::to_string(rank_) + "->" + std::to_string(r.peer) +
                           " full: receives are not keeping up (tag aliasing?)");
    }
    ch.q.push_back({r.tag, std::move(r.data)});
  }
  ch.cv.notify_all();
  r.done = true;
  --outstanding_;
}

void InprocTransport::flush_outbox() {
  if (outbox_.empty()) return;
  if (!randomized_) {
    for (std::size_t id : outbox_) deliver(id);
    outbox_.clear();
    return;
  }
  // Shuffle the batch, but keep program order within each (dest, tag) group
  // so the per-channel FIFO-per-tag guarantee still holds: the shuffled slots
  // of a group are filled with that group's messages oldest-first.
  std::vector<std::size_t> slots = outbox_;
  std::shuffle(slots.begin(), slots.end(), rng_);
  std::map<std::pair<int, int>, std::deque<std::size_t>> groups;
  for (std::size_t id : outbox_) {
    groups[{reqs_[id].peer, reqs_[id].tag}].push_back(id);
  }
  for (std::size_t slot : slots) {
    auto& g = groups[{reqs_[slot].peer, reqs_[slot].tag}];
    deliver(g.front());
    g.pop_front();
  }
  outbox_.clear();
}

Payload InprocTransport::match_recv(ReqState& r) {
  auto& ch = bus_->channel(r.peer, rank_);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double, std::milli>(bus_->config().timeout_ms));
  std::unique_lock lock(ch.m);
  for (;;) {
    bus_->check_poison();
    // first message with this tag; other tags keep their queue positions
    auto it = std::find_if(ch.q.begin(), ch.q.end(),
                           [&](const InprocBus::Message& m) { return m.tag == r.tag; });
    if (it != ch.q.end()) {
      if (it->data.size() > r.capacity) {
        throw TransportError("recv tag " + std::to_string(r.tag) + " from rank " +
                             std::to_string(r.peer) + ": message of " +
                             std::to_string(it->data.size()) + " doubles exceeds capacity " +
                             std::to_string(r.capacity));
      }
      Payload out = std::move(it->data);
      ch.q.erase(it);
      return out;
    }
    if (ch.cv.wait_until(lock, deadline) == std::cv_status::timeout) {
      throw TransportTimeout("rank " + std::to_string(rank_) + ": receive timed out waiting on (src=" +
                             std::to_string(r.peer) + ", tag=" + std::to_string(r.tag) + ")");
    }
  }
}

std::vector<Payload> InprocTransport::wait_all(std::span<const Request> reqs) {
  flush_outbox();
  std::vector<Payload> out(reqs.size());
  std::string stuck;
  for (std::size_t n = 0; n < reqs.size(); ++n) {
    const std::size_t id = reqs[n].id;
    if (id >= reqs_.size()) throw TransportError("wait_all: bad request handle");
    ReqState& r = reqs_[id];
    if (!r.is_recv) continue;  // sends complete at flush
    if (r.done) throw TransportError("wait_all: request already completed");
    try {
      r.data = match_recv(r);
    } catch (const TransportTimeout&) {
      // one stuck receive usually means several; report them all
      for (std::size_t m = n; m < reqs.size(); ++m) {
        const ReqState& s = reqs_[reqs[m].id];
        if (s.is_recv && !s.done) {
          stuck += (stuck.empty() ? "" : ", ");
          stuck += "(src=" + std::to_string(s.peer) + ", tag=" + std::to_string(s.tag) + ")";
        }
      }
      throw TransportTimeout("rank " + std::to_string(rank_) +
                             ": receive timed out; outstanding: " + stuck);
    }
    r.done = true;
    --outstanding_;
    out[n] = std::move(r.data);
  }
  if (outstanding_ == 0) {
    reqs_.clear();  // handles are invalid past completion; reclaim in bulk
  }
  return out;
}

void InprocTransport::barrier() {
  flush_outbox();
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double, std::milli>(bus_->config().timeout_ms));
  std::unique_lock lock(bus_->barrier_m_);
  const std::uint64_t gen = bus_->barrier_gen_;
  if (++bus_->barrier_count_ == bus_->size()) {
    bus_->barrier_count_ = 0;
    ++bus_->barrier_gen_;
    bus_->barrier_cv_.notify_all();
    return;
  }
  for (;;) {
    bus_->check_poison();
    if (bus_->barrier_gen_ != gen) return;
    if (bus_->barrier_cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      throw TransportTimeout("rank " + std::to_string(rank_) + ": barrier timed out");
    }
  }
}

}  // namespace cavity::transport
