#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavity/decomp.hpp"
#include "cavity/field.hpp"
#include "cavity/slab.hpp"
#include "cavity/transport.hpp"

namespace cavity {

/// Ghost-exchange strategies, cheapest-to-build first:
///  - baseline: one message per (face, variable), both ghost layers.
///  - v1: i-faces pack all five variables into one message (both layers);
///        j/k faces stay per-variable.
///  - v2: v1, but the packed i-face message is stencil-sized: two pressure
///        layers, one layer for everything else.
///  - v3: every decomposed axis gets the packed, stencil-sized treatment.
enum class Strategy { Baseline, V1, V2, V3 };

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& s);

/// One message of the per-iteration exchange on this rank.
struct PlanEntry {
  Face face{};       // our face; the neighbour receives on the opposite one
  int neighbor = 0;
  struct VarDepth {
    Var var;
    int depth;
  };
  std::vector<VarDepth> vars;  // packing order within the payload
  std::size_t scalars = 0;     // payload length in doubles
  int send_tag = 0;            // receiver-face-id * 8 + group
  int recv_tag = 0;
};

struct ExchangePlan {
  Strategy strategy = Strategy::Baseline;
  std::vector<PlanEntry> entries;
  bool corrupt_first = false;  // test hook: bump the first received double

  std::size_t total_scalars() const;
  std::size_t message_count() const { return entries.size(); }
};

/// Builds the per-rank message list for one strategy. Message sizes are
/// computed, not allocated, so plans for very large blocks are cheap.
ExchangePlan build_plan(const Grid3& block, const NeighborTable& table, Strategy s);

/// Outbound traffic counters; bytes count payload only.
struct ByteLedger {
  std::array<std::uint64_t, 6> face_bytes{};     // cumulative, by face id
  std::array<std::uint64_t, 6> face_messages{};
  std::array<std::uint64_t, 6> last_face_bytes{};  // most recent exchange only
  std::uint64_t bytes_sent = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t exchanges = 0;

  void begin_exchange();
  void record_send(Face f, std::size_t bytes);
  friend bool operator==(const ByteLedger&, const ByteLedger&) = default;
};

/// In-flight exchange: sends posted, receives pending.
struct InFlight {
  FieldSet* fields = nullptr;
  const ExchangePlan* plan = nullptr;
  transport::Transport* tr = nullptr;
  std::vector<transport::Request> reqs;
  std::vector<int> recv_entry;  // parallel to reqs, -1 for sends
  bool active = false;
};

/// Posts all sends and receives for one halo refresh. Ghost values are not
/// valid until exchange_finish returns.
InFlight exchange_begin(FieldSet& f, const ExchangePlan& plan, transport::Transport& tr,
                        ByteLedger* ledger);

/// Completes a begun exchange and unpacks ghosts. Throws std::logic_error if
/// the handle was never begun or was already finished.
void exchange_finish(InFlight& inflight);

/// begin + finish in one call.
void exchange(FieldSet& f, const ExchangePlan& plan, transport::Transport& tr, ByteLedger* ledger);

/// Pressure at the global centre node floor((N-1)/2), read on the owning
/// rank and broadcast to everyone.
double center_pressure_broadcast(const FieldSet& f, const BlockMap& map, transport::Transport& tr);

}  // namespace cavity
