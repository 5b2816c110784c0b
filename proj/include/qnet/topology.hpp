#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qnet/random.hpp"

namespace qnet {

struct NodeId {
  std::size_t index = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct NodeState {
  NodeId id;
  int free_qubits = 0;
  int capacity = 0;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

// Undirected quantum channel. Endpoints are stored as (low, high).
struct Channel {
  NodeId a;
  NodeId b;
  int epr_count = 0;
  double fidelity = 1.0;
  double initial_fidelity = 1.0;

  friend bool operator==(const Channel&, const Channel&) = default;
};

struct SimParams {
  int rows = 3;
  int cols = 4;
  int initial_qubits = 8;
  int capacity = 10;
  int initial_epr = 1;
  double fidelity_low = 0.85;
  double fidelity_high = 1.0;
  double f_min = 0.5;
  double gamma = 0.995;
  double p_loss = 0.01;
  double p_regen = 0.2;
  int max_recalcs = 10;
  std::uint64_t seed = 1;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

// A violated parameter invariant and the fields it involves.
struct ParamViolation {
  std::string message;
  std::vector<std::string> fields;
};

inline std::optional<ParamViolation> check_params(const SimParams& p) {
  auto fail = [](std::string msg, std::vector<std::string> fields) {
    return std::optional<ParamViolation>(ParamViolation{std::move(msg), std::move(fields)});
  };
  if (p.rows < 2) return fail("rows must be at least 2", {"rows"});
  if (p.cols < 2) return fail("cols must be at least 2", {"cols"});
  if (p.capacity < 1) return fail("capacity must be positive", {"capacity"});
  if (p.initial_qubits < 0) return fail("initial_qubits must be non-negative", {"initial_qubits"});
  if (p.initial_qubits > p.capacity) {
    return fail("initial_qubits exceeds capacity", {"initial_qubits", "capacity"});
  }
  if (p.initial_epr < 0) return fail("initial_epr must be non-negative", {"initial_epr"});
  if (!(p.f_min > 0.0)) return fail("f_min must be positive", {"f_min"});
  if (!(p.f_min <= p.fidelity_low)) {
    return fail("f_min must not exceed fidelity_low", {"f_min", "fidelity_low"});
  }
  if (!(p.fidelity_low <= p.fidelity_high)) {
    return fail("fidelity_low must not exceed fidelity_high", {"fidelity_low", "fidelity_high"});
  }
  if (!(p.fidelity_high <= 1.0)) return fail("fidelity_high must not exceed 1", {"fidelity_high"});
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) return fail("gamma must lie in (0, 1]", {"gamma"});
  if (!(p.p_loss >= 0.0 && p.p_loss <= 1.0)) return fail("p_loss must lie in [0, 1]", {"p_loss"});
  if (!(p.p_regen >= 0.0 && p.p_regen <= 1.0)) {
    return fail("p_regen must lie in [0, 1]", {"p_regen"});
  }
  if (p.max_recalcs < 1) return fail("max_recalcs must be positive", {"max_recalcs"});
  return std::nullopt;
}

inline void validate(const SimParams& p) {
  if (auto err = check_params(p)) throw std::invalid_argument(err->message);
}

class Network {
 public:
  Network() = default;

  explicit Network(std::vector<NodeState> nodes)
      : nodes_(std::move(nodes)), neighbor_ids_(nodes_.size()), links_(nodes_.size()) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id.index != i) throw std::invalid_argument("node ids must be dense and ordered");
    }
  }

  // Channels must be added in a deterministic order; that order is the
  // channel index order used by the dynamics.
  Channel& add_channel(NodeId a, NodeId b, int epr_count, double fidelity) {
    check(a);
    check(b);
    if (a == b) throw std::invalid_argument("channel endpoints must be distinct");
    if (find(a, b) != npos) throw std::invalid_argument("duplicate channel");
    if (a > b) std::swap(a, b);
    const std::size_t idx = channels_.size();
    channels_.push_back(Channel{a, b, epr_count, fidelity, fidelity});
    insert_link(a, b, idx);
    insert_link(b, a, idx);
    return channels_.back();
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t channel_count() const { return channels_.size(); }

  const std::vector<NodeState>& nodes() const { return nodes_; }
  const std::vector<Channel>& channels() const { return channels_; }
  std::vector<NodeState>& nodes() { return nodes_; }
  std::vector<Channel>& channels() { return channels_; }

  bool valid(NodeId n) const { return n.index < nodes_.size(); }

  const NodeState& node(NodeId n) const {
    check(n);
    return nodes_[n.index];
  }
  NodeState& node(NodeId n) {
    check(n);
    return nodes_[n.index];
  }

  // Sorted ascending by index.
  const std::vector<NodeId>& neighbors(NodeId n) const {
    check(n);
    return neighbor_ids_[n.index];
  }

  std::size_t degree(NodeId n) const { return neighbors(n).size(); }

  const Channel* channel_between(NodeId a, NodeId b) const {
    const std::size_t idx = find(a, b);
    return idx == npos ? nullptr : &channels_[idx];
  }
  Channel* channel_between(NodeId a, NodeId b) {
    const std::size_t idx = find(a, b);
    return idx == npos ? nullptr : &channels_[idx];
  }

  int total_free_qubits() const {
    int sum = 0;
    for (const auto& n : nodes_) sum += n.free_qubits;
    return sum;
  }

  int total_epr() const {
    int sum = 0;
    for (const auto& c : channels_) sum += c.epr_count;
    return sum;
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void check(NodeId n) const {
    if (!valid(n)) throw std::out_of_range("invalid node id " + std::to_string(n.index));
  }

  std::size_t find(NodeId a, NodeId b) const {
    if (!valid(a) || !valid(b)) return npos;
    const auto& ids = neighbor_ids_[a.index];
    const auto it = std::lower_bound(ids.begin(), ids.end(), b);
    if (it == ids.end() || *it != b) return npos;
    return links_[a.index][static_cast<std::size_t>(it - ids.begin())];
  }

  void insert_link(NodeId from, NodeId to, std::size_t channel) {
    auto& ids = neighbor_ids_[from.index];
    auto& chans = links_[from.index];
    const auto pos = std::lower_bound(ids.begin(), ids.end(), to) - ids.begin();
    ids.insert(ids.begin() + pos, to);
    chans.insert(chans.begin() + pos, channel);
  }

  std::vector<NodeState> nodes_;
  std::vector<Channel> channels_;
  // Parallel per-node arrays: sorted neighbor ids and the matching channel index.
  std::vector<std::vector<NodeId>> neighbor_ids_;
  std::vector<std::vector<std::size_t>> links_;
};

inline NodeId lattice_node(const SimParams& p, int row, int col) {
  return NodeId{static_cast<std::size_t>(row) * static_cast<std::size_t>(p.cols) +
                static_cast<std::size_t>(col)};
}

// rows x cols grid, row-major node ids, no diagonals. Channels are created in
// ascending (low, high) endpoint order and draw their fidelities from `rng`
// in that order.
inline Network build_lattice(const SimParams& p, Rng& rng) {
  if (p.rows < 2 || p.cols < 2) {
    throw std::invalid_argument("lattice needs rows >= 2 and cols >= 2");
  }
  validate(p);

  const std::size_t n = static_cast<std::size_t>(p.rows) * static_cast<std::size_t>(p.cols);
  std::vector<NodeState> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = NodeState{NodeId{i}, p.initial_qubits, p.capacity};
  Network net(std::move(nodes));

  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      const NodeId here = lattice_node(p, r, c);
      if (c + 1 < p.cols) {
        net.add_channel(here, lattice_node(p, r, c + 1), p.initial_epr,
                        uniform_real(rng, p.fidelity_low, p.fidelity_high));
      }
      if (r + 1 < p.rows) {
        net.add_channel(here, lattice_node(p, r + 1, c), p.initial_epr,
                        uniform_real(rng, p.fidelity_low, p.fidelity_high));
      }
    }
  }
  return net;
}

inline Network build_lattice(const SimParams& p) {
  Rng rng(p.seed);
  return build_lattice(p, rng);
}

}  // namespace qnet
