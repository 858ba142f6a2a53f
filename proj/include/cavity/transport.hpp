#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavity::transport {

using Payload = std::vector<double>;

struct Request {
  std::size_t id = 0;
};

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a wait outlives the configured timeout; the message names the
/// waiting rank and every (source rank, tag) still outstanding.
struct TransportTimeout : TransportError {
  using TransportError::TransportError;
};

/// Rank-addressed, tag-matched, non-blocking message passing. post_* return
/// immediately; completion happens in wait_all. Messages between one
/// (source, destination) pair with the same tag arrive in posting order.
/// Request handles are only valid until the wait_all that completes them.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int world_size() const = 0;

  virtual Request post_send(int dest, int tag, Payload data) = 0;
  /// `capacity` is the most doubles the matched message may carry.
  virtual Request post_recv(int src, int tag, std::size_t capacity) = 0;

  /// Blocks until every handle completes. The result is aligned with `reqs`:
  /// received payloads for recvs, empty payloads for sends.
  virtual std::vector<Payload> wait_all(std::span<const Request> reqs) = 0;

  virtual void barrier() = 0;
};

// Collectives built on the point-to-point contract above. Tags from 1000 up
// are reserved for them; halo traffic stays below that.
inline constexpr int kBroadcastTag = 1000;
inline constexpr int kReduceTag = 1001;
inline constexpr int kReduceResultTag = 1002;
inline constexpr int kGatherTag = 1003;

enum class ReduceOp { Sum, Min, Max };

/// Root's payload is copied to every rank; `count` is its length (must be
/// known on all ranks).
Payload broadcast_payload(Transport& t, int root, Payload data, std::size_t count);
double broadcast_double(Transport& t, int root, double value);

/// Combines one double per rank at rank 0 in ascending rank order (so the
/// result is identical on every run), then broadcasts it back.
double reduce_fixed_order(Transport& t, ReduceOp op, double value);

/// Collects one payload per rank at `root`, indexed by rank; other ranks get
/// an empty vector. `counts[r]` is rank r's payload length.
std::vector<Payload> gather_payloads(Transport& t, int root, Payload mine,
                                     const std::vector<std::size_t>& counts);

}  // namespace cavity::transport
