#include "cavity/transport.hpp"

#include <algorithm>

namespace cavity::transport {

Payload broadcast_payload(Transport& t, int root, Payload data, std::size_t count) {
  const int np = t.world_size();
  if (np == 1) return data;
  if (t.rank() == root) {
    std::vector<Request> reqs;
    reqs.reserve(static_cast<std::size_t>(np) - 1);
    for (int r = 0; r < np; ++r) {
      if (r != root) reqs.push_back(t.post_send(r, kBroadcastTag, data));
    }
    t.wait_all(reqs);
    return data;
  }
  const Request req = t.post_recv(root, kBroadcastTag, count);
  return std::move(t.wait_all({&req, 1}).front());
}

double broadcast_double(Transport& t, int root, double value) {
  return broadcast_payload(t, root, Payload{value}, 1).front();
}

double reduce_fixed_order(Transport& t, ReduceOp op, double value) {
  const int np = t.world_size();
  if (np == 1) return value;

  double result;
  if (t.rank() == 0) {
    // recvs posted in rank order, so wait_all hands the values back  in rank
    // order and the fold below is the same on every run
    std::vector<Request> reqs;
    reqs.reserve(static_cast<std::size_t>(np) - 1);
    for (int r = 1; r < np; ++r) reqs.push_back(t.post_recv(r, kReduceTag, 1));
    const auto parts = t.wait_all(reqs);
    double acc = value;
    for (const Payload& p : parts) {
      const double x = p.front();
      switch (op) {
        case ReduceOp::Sum: acc = acc + x; break;
        case ReduceOp::Min: acc = std::min(acc, x); break;
        case ReduceOp::Max: acc = std::max(acc, x); break;
      }
    }
    result = acc;
    std::vector<Request> sends;
    sends.reserve(static_cast<std::size_t>(np) - 1);
    for (int r = 1; r < np; ++r) sends.push_back(t.post_send(r, kReduceResultTag, Payload{result}));
    t.wait_all(sends);
  } else {
    const Request send = t.post_send(0, kReduceTag, Payload{value});
    t.wait_all({&send, 1});
    const Request recv = t.post_recv(0, kReduceResultTag, 1);
    result = t.wait_all({&recv, 1}).front().front();
  }
  return result;
}

std::vector<Payload> gather_payloads(Transport& t, int root, Payload mine,
                                     const std::vector<std::size_t>& counts) {
  const int np = t.world_size();
  std::vector<Payload> out;
  if (t.rank() == root) {
    out.resize(static_cast<std::size_t>(np));
    std::vector<Request> reqs;
    std::vector<int> senders;
    for (int r = 0; r < np; ++r) {
      if (r == root) continue;
      reqs.push_back(t.post_recv(r, kGatherTag, counts[static_cast<std::size_t>(r)]));
      senders.push_back(r);
    }
    auto parts = t.wait_all(reqs);
    for (std::size_t n = 0; n < parts.size(); ++n) {
      out[static_cast<std::size_t>(senders[n])] = std::move(parts[n]);
    }
    out[static_cast<std::size_t>(root)] = std::move(mine);
  } else {
    const Request send = t.post_send(root, kGatherTag, std::move(mine));
    t.wait_all({&send, 1});
  }
  return out;
}

}  // namespace cavity::transport
