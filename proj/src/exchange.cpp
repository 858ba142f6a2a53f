#include "cavity/exchange.hpp"

#include <stdexcept>

namespace cavity {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Baseline: return "baseline";
    case Strategy::V1: return "v1";
    case Strategy::V2: return "v2";
    default: return "v3";
  }
}

std::optional<Strategy> parse_strategy(const std::string& s) {
  if (s == "baseline") return Strategy::Baseline;
  if (s == "v1") return Strategy::V1;
  if (s == "v2") return Strategy::V2;
  if (s == "v3") return Strategy::V3;
  return std::nullopt;
}

std::size_t ExchangePlan::total_scalars() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.scalars;
  return n;
}

void ByteLedger::begin_exchange() {
  ++exchanges;
  last_face_bytes.fill(0);
}

void ByteLedger::record_send(Face f, std::size_t bytes) {
  const auto fid = static_cast<std::size_t>(face_id(f));
  face_bytes[fid] += bytes;
  last_face_bytes[fid] += bytes;
  face_messages[fid] += 1;
  bytes_sent += bytes;
  messages_sent += 1;
}

namespace {

constexpr std::array<Var, 5> kPackOrder{Var::P, Var::U, Var::V, Var::W, Var::T};

// tag = receiver-face-id * 8 + group; group 0 is the packed message, groups
// 1..5 are the per-variable ones. Receiver face id <= 5 and group <= 5, so
// halo tags stay below the collective band.
int tag_for(Face receiver_face, int group) { return face_id(receiver_face) * 8 + group; }

std::size_t face_area(const Grid3& g, Face f) {
  std::size_t area = 1;
  for (int a = 0; a < 3; ++a) {
    if (a == static_cast<int>(f.axis)) continue;
    area *= static_cast<std::size_t>(g.interior(static_cast<Axis>(a)));
  }
  return area;
}

int depth_for(Strategy s, Var v, bool stencil_sized) {
  if (!stencil_sized) return Grid3::ghost;
  (void)s;
  // the pressure stencil reads two neighbours along each axis, the rest one
  return v == Var::P ? Grid3::ghost : 1;
}

}  // namespace

ExchangePlan build_plan(const Grid3& block, const NeighborTable& table, Strategy s) {
  validate_grid(block);
  ExchangePlan plan;
  plan.strategy = s;
  for (int fid = 0; fid < 6; ++fid) {
    const Face face = face_from_id(fid);
    const int nbr = table.at(face);
    if (nbr == NeighborTable::kWall) continue;

    const bool i_face = face.axis == Axis::I;
    const bool packed = s == Strategy::V3 || ((s == Strategy::V1 || s == Strategy::V2) && i_face);
    const bool stencil_sized = s == Strategy::V3 || (s == Strategy::V2 && i_face);
    const std::size_t area = face_area(block, face);

    if (packed) {
      PlanEntry e;
      e.face = face;
      e.neighbor = nbr;
      for (Var v : kPackOrder) {
        const int d = depth_for(s, v, stencil_sized);
        e.vars.push_back({v, d});
        e.scalars += area * static_cast<std::size_t>(d);
      }
      e.send_tag = tag_for(opposite(face), 0);
      e.recv_tag = tag_for(face, 0);
      plan.entries.push_back(std::move(e));
    } else {
      for (Var v : kPackOrder) {
        PlanEntry e;
        e.face = face;
        e.neighbor = nbr;
        const int d = depth_for(s, v, stencil_sized);
        e.vars.push_back({v, d});
        e.scalars = area * static_cast<std::size_t>(d);
        const int group = 1 + static_cast<int>(v);
        e.send_tag = tag_for(opposite(face), group);
        e.recv_tag = tag_for(face, group);
        plan.entries.push_back(std::move(e));
      }
    }
  }
  return plan;
}

InFlight exchange_begin(FieldSet& f, const ExchangePlan& plan, transport::Transport& tr,
                        ByteLedger* ledger) {
  InFlight fl;
  fl.fields = &f;
  fl.plan = &plan;
  fl.tr = &tr;
  fl.active = true;
  if (ledger) ledger->begin_exchange();

  // receives first so matching never waits on our own sends
  for (std::size_t n = 0; n < plan.entries.size(); ++n) {
    const PlanEntry& e = plan.entries[n];
    fl.reqs.push_back(tr.post_recv(e.neighbor, e.recv_tag, e.scalars));
    fl.recv_entry.push_back(static_cast<int>(n));
  }
  for (const PlanEntry& e : plan.entries) {
    transport::Payload buf;
    buf.reserve(e.scalars);
    for (const auto& vd : e.vars) {
      const Box box = face_interior_box(f.grid, e.face, vd.depth);
      const std::size_t off = buf.size();
      buf.resize(off + static_cast<std::size_t>(box.volume()));
      copy_box_to(f[vd.var], box, buf.data() + off);
    }
    if (buf.size() != e.scalars) throw std::logic_error("exchange: pack size mismatch");
    fl.reqs.push_back(tr.post_send(e.neighbor, e.send_tag, std::move(buf)));
    fl.recv_entry.push_back(-1);
    if (ledger) ledger->record_send(e.face, e.scalars * sizeof(double));
  }
  return fl;
}

void exchange_finish(InFlight& fl) {
  if (!fl.active) {
    throw std::logic_error("exchange_finish: no exchange in flight (begin not called, or finished twice)");
  }
  fl.active = false;
  auto payloads = fl.tr->wait_all(fl.reqs);

  bool corrupted = !fl.plan->corrupt_first;
  for (std::size_t n = 0; n < payloads.size(); ++n) {
    const int entry = fl.recv_entry[n];
    if (entry < 0) continue;
    const PlanEntry& e = fl.plan->entries[static_cast<std::size_t>(entry)];
    transport::Payload& buf = payloads[n];
    if (buf.size() != e.scalars) {
      throw std::runtime_error("exchange: received " + std::to_string(buf.size()) +
                               " doubles on tag " + std::to_string(e.recv_tag) + ", expected " +
                               std::to_string(e.scalars));
    }
    if (!corrupted && !buf.empty()) {
      buf[0] += 1e-3;  // negative-control hook for the verification harness
      corrupted = true;
    }
    std::size_t off = 0;
    for (const auto& vd : e.vars) {
      const Box box = face_ghost_box(fl.fields->grid, e.face, vd.depth);
      copy_box_from((*fl.fields)[vd.var], box, buf.data() + off);
      off += static_cast<std::size_t>(box.volume());
    }
  }
}

void exchange(FieldSet& f, const ExchangePlan& plan, transport::Transport& tr, ByteLedger* ledger) {
  InFlight fl = exchange_begin(f, plan, tr, ledger);
  exchange_finish(fl);
}

double center_pressure_broadcast(const FieldSet& f, const BlockMap& map, transport::Transport& tr) {
  const auto node = map.center_node();
  const int owner = map.owner_of(node);
  double value = 0.0;
  if (tr.rank() == owner) {
    const BlockExtent& e = map.extent(owner);
    value = f.p.at(node[0] - e.lo[0] + Grid3::ghost, node[1] - e.lo[1] + Grid3::ghost,
                   node[2] - e.lo[2] + Grid3::ghost);
  }
  return transport::broadcast_double(tr, owner, value);
}

}  // namespace cavity
