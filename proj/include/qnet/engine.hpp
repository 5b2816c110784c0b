#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qnet/dynamics.hpp"
#include "qnet/random.hpp"
#include "qnet/routing.hpp"
#include "qnet/topology.hpp"

namespace qnet {

struct TransmissionOutcome {
  bool delivered = false;
  double end_to_end_fidelity = 0.0;  // only meaningful when delivered
  std::size_t eprs_created = 0;
  std::size_t failed_creations = 0;
  std::size_t recalculations = 0;
  std::size_t hops_taken = 0;
  std::vector<double> per_hop_fidelities;

  friend bool operator==(const TransmissionOutcome&, const TransmissionOutcome&) = default;
};

enum class UndeliveredReason {
  no_initial_route,
  recalculation_limit,
  no_detour,
};

constexpr std::string_view to_string(UndeliveredReason r) {
  switch (r) {
    case UndeliveredReason::no_initial_route: return "no route of the requested length";
    case UndeliveredReason::recalculation_limit: return "recalculation limit reached";
    case UndeliveredReason::no_detour: return "no feasible detour from the stranded node";
  }
  return "unknown";
}

// Receives engine events; the defaults do nothing.
struct TransmissionObserver {
  void route_selected(const Route&, bool /*recalculated*/) {}
  void epr_created(NodeId, NodeId) {}
  void epr_creation_failed(NodeId, NodeId, ResourceStatus) {}
  void hop(NodeId, NodeId, double /*fidelity*/) {}
  void recalculation(std::size_t /*count*/, NodeId /*stranded_at*/) {}
  void undelivered(UndeliveredReason) {}
  void delivered(const TransmissionOutcome&) {}
};

inline std::size_t lattice_hop_distance(const Network& net, NodeId a, NodeId b) {
  if (!net.valid(b)) throw std::out_of_range("invalid node id");
  const std::size_t d = hop_distances_from(net, a)[b.index];
  if (d == unreachable) throw std::domain_error("nodes are disconnected");
  return d;
}

// Shortest detour from a stranded node: the first length in
// [distance, max_len] with at least one candidate route.
inline std::optional<Route> select_detour(const Network& net, NodeId from, NodeId dst,
                                          long long max_len, Strategy strategy) {
  const auto dist = static_cast<long long>(lattice_hop_distance(net, from, dst));
  for (long long len = dist; len <= max_len; ++len) {
    if (auto r = select_route(net, from, dst, static_cast<std::size_t>(len), strategy)) return r;
  }
  return std::nullopt;
}

// Forwards one qubit hop by hop. A hop with a pair available teleports
// immediately; otherwise one pair is entangled on demand. If that fails for
// lack of qubits the route is recalculated from the stranded node. Every
// creation attempt and every teleport is followed by exactly one tick.
template <typename Observer = TransmissionObserver>
TransmissionOutcome send_qubit(Network& net, NodeId src, NodeId dst, std::size_t edge_len,
                               Strategy strategy, const SimParams& params, Rng& rng,
                               InteractionLog& log, Observer&& observer = Observer{}) {
  detail::check_endpoints(net, src, dst, edge_len);
  TransmissionOutcome out;

  std::optional<Route> route = select_route(net, src, dst, edge_len, strategy);
  if (!route) {
    observer.undelivered(UndeliveredReason::no_initial_route);
    return out;
  }
  observer.route_selected(*route, false);

  const auto recalc_limit = static_cast<std::size_t>(params.max_recalcs);
  std::size_t pos = 0;
  while (pos + 1 < route->nodes.size()) {
    const NodeId here = route->nodes[pos];
    const NodeId next = route->nodes[pos + 1];
    const Channel* ch = net.channel_between(here, next);
    if (ch == nullptr) throw std::logic_error("selected route has a non-adjacent hop");

    if (ch->epr_count < 1) {
      const ResourceStatus made = create_epr(net, here, next, log);
      interaction_tick(net, params, rng, log);
      if (made == ResourceStatus::ok) {
        ++out.eprs_created;
        observer.epr_created(here, next);
      } else {
        ++out.failed_creations;
        observer.epr_creation_failed(here, next, made);
        if (out.recalculations >= recalc_limit) {
          observer.undelivered(UndeliveredReason::recalculation_limit);
          return out;
        }
        ++out.recalculations;
        observer.recalculation(out.recalculations, here);
        const long long budget = static_cast<long long>(edge_len) -
                                 static_cast<long long>(out.hops_taken) + 2;
        route = select_detour(net, here, dst, budget, strategy);
        if (!route) {
          observer.undelivered(UndeliveredReason::no_detour);
          return out;
        }
        observer.route_selected(*route, true);
        pos = 0;
        continue;
      }
    }

    const HopResult hop = teleport_hop(net, here, next, log);
    if (!hop) throw std::logic_error("teleport failed on a provisioned channel");
    interaction_tick(net, params, rng, log);
    out.per_hop_fidelities.push_back(hop.fidelity);
    ++out.hops_taken;
    observer.hop(here, next, hop.fidelity);
    ++pos;
  }

  out.delivered = true;
  out.end_to_end_fidelity = 1.0;
  for (double f : out.per_hop_fidelities) out.end_to_end_fidelity *= f;
  observer.delivered(out);
  return out;
}

}  // namespace qnet
