#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qnet/topology.hpp"

namespace qnet {

struct Route {
  std::vector<NodeId> nodes;

  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  NodeId front() const { return nodes.front(); }
  NodeId back() const { return nodes.back(); }

  friend auto operator<=>(const Route&, const Route&) = default;
};

enum class Strategy {
  max_fidelity,
  max_epr,
  max_qubits,
};

inline constexpr Strategy all_strategies[] = {Strategy::max_fidelity, Strategy::max_epr,
                                              Strategy::max_qubits};

constexpr std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::max_fidelity: return "max_fidelity";
    case Strategy::max_epr: return "max_epr";
    case Strategy::max_qubits: return "max_qubits";
  }
  return "unknown";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

inline constexpr std::size_t unreachable = std::numeric_limits<std::size_t>::max();

// Unweighted BFS edge counts from `from`; `unreachable` for disconnected nodes.
inline std::vector<std::size_t> hop_distances_from(const Network& net, NodeId from) {
  std::vector<std::size_t> dist(net.node_count(), unreachable);
  std::queue<NodeId> frontier;
  dist[net.node(from).id.index] = 0;
  frontier.push(from);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : net.neighbors(u)) {
      if (dist[v.index] == unreachable) {
        dist[v.index] = dist[u.index] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

namespace detail {

inline void check_endpoints(const Network& net, NodeId src, NodeId dst, std::size_t edge_len) {
  if (!net.valid(src) || !net.valid(dst)) throw std::out_of_range("invalid route endpoint");
  if (src == dst) throw std::invalid_argument("route source and destination must differ");
  if (edge_len < 1) throw std::invalid_argument("route length must be at least one edge");
}

template <typename Visit>
void extend_paths(const Network& net, NodeId dst, std::size_t budget,
                  const std::vector<std::size_t>& dist_to_dst, std::vector<char>& on_path,
                  std::vector<NodeId>& path, Visit& visit) {
  const NodeId here = path.back();
  if (here == dst) {
    if (budget == 0) visit(std::span<const NodeId>(path));
    return;
  }
  if (budget == 0) return;
  for (NodeId next : net.neighbors(here)) {
    // dist > budget - 1 means dst cannot be reached in the remaining steps.
    if (on_path[next.index] || dist_to_dst[next.index] > budget - 1) continue;
    on_path[next.index] = 1;
    path.push_back(next);
    extend_paths(net, dst, budget - 1, dist_to_dst, on_path, path, visit);
    path.pop_back();
    on_path[next.index] = 0;
  }
}

}  // namespace detail

// Calls visit(span<const NodeId>) for every simple src -> dst path with
// exactly edge_len edges. Neighbors are expanded in ascending order, so paths
// arrive in lexicographic order of their node sequences.
template <typename Visit>
void for_each_simple_path(const Network& net, NodeId src, NodeId dst, std::size_t edge_len,
                          Visit&& visit) {
  detail::check_endpoints(net, src, dst, edge_len);
  const auto dist = hop_distances_from(net, dst);
  if (dist[src.index] > edge_len) return;
  std::vector<char> on_path(net.node_count(), 0);
  std::vector<NodeId> path;
  path.reserve(edge_len + 1);
  path.push_back(src);
  on_path[src.index] = 1;
  detail::extend_paths(net, dst, edge_len, dist, on_path, path, visit);
}

inline std::vector<Route> enumerate_simple_paths(const Network& net, NodeId src, NodeId dst,
                                                 std::size_t edge_len) {
  std::vector<Route> out;
  for_each_simple_path(net, src, dst, edge_len, [&](std::span<const NodeId> p) {
    out.push_back(Route{{p.begin(), p.end()}});
  });
  return out;
}

inline double score_route(const Network& net, std::span<const NodeId> nodes, Strategy strategy) {
  if (nodes.size() < 2) throw std::invalid_argument("route needs at least two nodes");
  double fidelity = 1.0;
  long long resources = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Channel* ch = net.channel_between(nodes[i], nodes[i + 1]);
    if (ch == nullptr) throw std::invalid_argument("route contains a non-adjacent hop");
    fidelity *= ch->fidelity;
    resources += ch->epr_count;
  }
  switch (strategy) {
    case Strategy::max_fidelity: return fidelity;
    case Strategy::max_epr: return static_cast<double>(resources);
    case Strategy::max_qubits: {
      long long qubits = 0;
      for (NodeId n : nodes) qubits += net.node(n).free_qubits;
      return static_cast<double>(qubits);
    }
  }
  throw std::invalid_argument("unknown strategy");
}

inline double score_route(const Network& net, const Route& route, Strategy strategy) {
  return score_route(net, std::span<const NodeId>(route.nodes), strategy);
}

// Best-scoring exact-length route; the first (lexicographically smallest)
// candidate wins ties.
inline std::optional<Route> select_route(const Network& net, NodeId src, NodeId dst,
                                         std::size_t edge_len, Strategy strategy) {
  std::optional<Route> best;
  double best_score = 0.0;
  for_each_simple_path(net, src, dst, edge_len, [&](std::span<const NodeId> p) {
    const double s = score_route(net, p, strategy);
    if (!best || s > best_score) {
      best_score = s;
      best = Route{{p.begin(), p.end()}};
    }
  });
  return best;
}

// True when consecutive nodes are adjacent in `net` and no node repeats.
inline bool is_simple_route(const Network& net, const Route& route) {
  if (route.nodes.size() < 2) return false;
  std::vector<char> seen(net.node_count(), 0);
  for (std::size_t i = 0; i < route.nodes.size(); ++i) {
    const NodeId n = route.nodes[i];
    if (!net.valid(n) || seen[n.index]) return false;
    seen[n.index] = 1;
    if (i + 1 < route.nodes.size() && net.channel_between(n, route.nodes[i + 1]) == nullptr) {
      return false;
    }
  }
  return true;
}

}  // namespace qnet
