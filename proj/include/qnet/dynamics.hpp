#pragma once

#include <algorithm>
#include <cstdint>
#include <string_view>

#include "qnet/random.hpp"
#include "qnet/topology.hpp"

namespace qnet {

struct InteractionLog {
  std::uint64_t entangle_count = 0;
  std::uint64_t teleport_count = 0;
  std::uint64_t qubits_consumed = 0;
  std::uint64_t qubits_lost = 0;
  std::uint64_t qubits_regenerated = 0;

  friend bool operator==(const InteractionLog&, const InteractionLog&) = default;
};

enum class ResourceStatus {
  ok,
  not_adjacent,
  insufficient_qubits,
  no_epr_available,
};

constexpr std::string_view to_string(ResourceStatus s) {
  switch (s) {
    case ResourceStatus::ok: return "ok";
    case ResourceStatus::not_adjacent: return "not_adjacent";
    case ResourceStatus::insufficient_qubits: return "insufficient_qubits";
    case ResourceStatus::no_epr_available: return "no_epr_available";
  }
  return "unknown";
}

struct HopResult {
  ResourceStatus status = ResourceStatus::ok;
  double fidelity = 0.0;  // channel fidelity at consumption, valid when status == ok

  explicit operator bool() const { return status == ResourceStatus::ok; }
};

// Entangles one fresh pair across (a, b), spending one free qubit on each
// endpoint. The new pair restores the channel to its native fidelity.
// Failure leaves the network untouched.
inline ResourceStatus create_epr(Network& net, NodeId a, NodeId b, InteractionLog& log) {
  Channel* ch = net.channel_between(a, b);
  if (ch == nullptr) return ResourceStatus::not_adjacent;
  NodeState& na = net.node(a);
  NodeState& nb = net.node(b);
  if (na.free_qubits <= 0 || nb.free_qubits <= 0) return ResourceStatus::insufficient_qubits;

  --na.free_qubits;
  --nb.free_qubits;
  ++ch->epr_count;
  ch->fidelity = ch->initial_fidelity;
  ++log.entangle_count;
  log.qubits_consumed += 2;
  return ResourceStatus::ok;
}

// Teleports across one channel, consuming exactly one pair.
inline HopResult teleport_hop(Network& net, NodeId a, NodeId b, InteractionLog& log) {
  Channel* ch = net.channel_between(a, b);
  if (ch == nullptr) return {ResourceStatus::not_adjacent, 0.0};
  if (ch->epr_count <= 0) return {ResourceStatus::no_epr_available, 0.0};

  --ch->epr_count;
  ++log.teleport_count;
  return {ResourceStatus::ok, ch->fidelity};
}

// One network-wide decoherence step: channel fidelities decay by `gamma`
// (floored at f_min), then every node, in index order, draws a loss and a
// regeneration trial. Both draws are taken for every node regardless of its
// state, so the rng stream length per tick is fixed at 2 * |V|.
inline void interaction_tick(Network& net, const SimParams& params, Rng& rng, InteractionLog& log) {
  for (Channel& ch : net.channels()) {
    ch.fidelity = std::max(params.f_min, ch.fidelity * params.gamma);
  }
  for (NodeState& node : net.nodes()) {
    const bool lose = bernoulli(rng, params.p_loss);
    const bool regen = bernoulli(rng, params.p_regen);
    if (lose && node.free_qubits > 0) {
      --node.free_qubits;
      ++log.qubits_lost;
    }
    if (regen && node.free_qubits < node.capacity) {
      ++node.free_qubits;
      ++log.qubits_regenerated;
    }
  }
}

}  // namespace qnet
