#include <gtest/gtest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qnet/dynamics.hpp"
#include "qnet/engine.hpp"
#include "qnet/routing.hpp"
#include "qnet/topology.hpp"
#include "support/oracles.hpp"

namespace qnet {
namespace {

using testing::identity_params;

struct Recorder : TransmissionObserver {
  std::vector<Route> routes;
  std::size_t recalcs = 0;
  std::optional<UndeliveredReason> reason;

  void route_selected(const Route& r, bool) { routes.push_back(r); }
  void recalculation(std::size_t, NodeId) { ++recalcs; }
  void undelivered(UndeliveredReason why) { reason = why; }
};

TEST(SendQubit, FullyProvisionedIdentityNetwork) {
  SimParams p = identity_params();
  p.initial_epr = 1;
  Network net = build_lattice(p);
  Rng rng(1);
  InteractionLog log;
  const auto out = send_qubit(net, NodeId{0}, NodeId{3}, 3, Strategy::max_fidelity, p, rng, log);
  EXPECT_TRUE(out.delivered);
  EXPECT_EQ(out.end_to_end_fidelity, 1.0);
  EXPECT_EQ(out.eprs_created, 0u);
  EXPECT_EQ(out.recalculations, 0u);
  EXPECT_EQ(out.hops_taken, 3u);
  EXPECT_EQ(out.per_hop_fidelities, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(SendQubit, EveryHopCreatesAPairWhenNoneExist) {
  SimParams p = identity_params();
  p.initial_epr = 0;
  p.initial_qubits = 8;
  Network net = build_lattice(p);
  Rng rng(1);
  InteractionLog log;
  const auto out = send_qubit(net, NodeId{0}, NodeId{3}, 3, Strategy::max_fidelity, p, rng, log);
  EXPECT_TRUE(out.delivered);
  EXPECT_EQ(out.eprs_created, 3u);
  EXPECT_EQ(out.recalculations, 0u);
  EXPECT_EQ(out.failed_creations, 0u);
  // Route 0-1-2-3 spends one qubit at each end and two at each interior node.
  EXPECT_EQ(net.node(NodeId{0}).free_qubits, 7);
  EXPECT_EQ(net.node(NodeId{1}).free_qubits, 6);
  EXPECT_EQ(net.node(NodeId{2}).free_qubits, 6);
  EXPECT_EQ(net.node(NodeId{3}).free_qubits, 7);
  EXPECT_EQ(net.total_epr(), 0);
}

TEST(SendQubit, DeadNetworkHitsRecalculationCap) {
  SimParams p = identity_params();
  p.initial_qubits = 0;
  p.initial_epr = 0;
  Network net = build_lattice(p);
  Rng rng(1);
  InteractionLog log;
  Recorder rec;
  const auto out = send_qubit(net, NodeId{0}, NodeId{11}, 5, Strategy::max_qubits, p, rng, log, rec);
  EXPECT_FALSE(out.delivered);
  EXPECT_EQ(out.recalculations, static_cast<std::size_t>(p.max_recalcs));
  EXPECT_EQ(out.failed_creations, static_cast<std::size_t>(p.max_recalcs) + 1);
  EXPECT_EQ(out.hops_taken, 0u);
  EXPECT_EQ(rec.reason, UndeliveredReason::recalculation_limit);
}

TEST(SendQubit, NoRouteOfRequestedLength) {
  SimParams p = identity_params(2, 2);
  Network net = build_lattice(p);
  Rng rng(1);
  InteractionLog log;
  Recorder rec;
  const auto out = send_qubit(net, NodeId{0}, NodeId{3}, 3, Strategy::max_epr, p, rng, log, rec);
  EXPECT_FALSE(out.delivered);
  EXPECT_EQ(out.recalculations, 0u);
  EXPECT_EQ(rec.reason, UndeliveredReason::no_initial_route);
}

// Hand-stepped: every node starts empty and regenerates one qubit per tick.
// Attempt 1 on 0-1 fails (tick: all nodes 1), recalculation keeps 0-1-3,
// attempt 2 succeeds, then teleport, then 1-3 is created and teleported.
TEST(SendQubit, RegenerationRescuesAfterOneRecalculation) {
  SimParams p = identity_params(2, 2);
  p.initial_qubits = 0;
  p.initial_epr = 0;
  p.p_regen = 1.0;
  Network net = build_lattice(p);
  Rng rng(1);
  InteractionLog log;
  Recorder rec;
  const auto out = send_qubit(net, NodeId{0}, NodeId{3}, 2, Strategy::max_fidelity, p, rng, log, rec);
  EXPECT_TRUE(out.delivered);
  EXPECT_EQ(out.recalculations, 1u);
  EXPECT_EQ(out.failed_creations, 1u);
  EXPECT_EQ(out.eprs_created, 2u);
  EXPECT_EQ(out.hops_taken, 2u);
  ASSERT_EQ(rec.routes.size(), 2u);
  EXPECT_EQ(testing::to_indices(rec.routes[1]), (std::vector<std::size_t>{0, 1, 3}));
}

TEST(SendQubit, RejectsInvalidEndpoints) {
  SimParams p = identity_params();
  Network net = build_lattice(p);
  Rng rng(1);
  InteractionLog log;
  EXPECT_THROW(send_qubit(net, NodeId{2}, NodeId{2}, 2, Strategy::max_epr, p, rng, log),
               std::invalid_argument);
  EXPECT_THROW(send_qubit(net, NodeId{0}, NodeId{40}, 2, Strategy::max_epr, p, rng, log),
               std::out_of_range);
}

TEST(SendQubit, IdentityOutcomeIndependentOfRng) {
  SimParams p = identity_params();
  p.initial_epr = 5;
  for (Strategy s : all_strategies) {
    Network a = build_lattice(p);
    Network b = a;
    Rng ra(1), rb(987654321);
    InteractionLog la, lb;
    for (int q = 0; q < 5; ++q) {
      EXPECT_EQ(send_qubit(a, NodeId{0}, NodeId{11}, 7, s, p, ra, la),
                send_qubit(b, NodeId{0}, NodeId{11}, 7, s, p, rb, lb));
    }
    EXPECT_EQ(a, b);
  }
}

TEST(SelectDetour, ShortestFeasibleLengthWithinBudget) {
  SimParams p;
  const Network net = build_lattice(p);
  const auto r = select_detour(net, NodeId{0}, NodeId{11}, 7, Strategy::max_fidelity);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->edge_count(), 5u);
  EXPECT_FALSE(select_detour(net, NodeId{0}, NodeId{11}, 4, Strategy::max_fidelity));
}

TEST(LatticeHopDistance, Examples) {
  const Network net = build_lattice(SimParams{});
  EXPECT_EQ(lattice_hop_distance(net, NodeId{0}, NodeId{11}), 5u);
  EXPECT_EQ(lattice_hop_distance(net, NodeId{6}, NodeId{6}), 0u);
  SimParams sq;
  sq.rows = 2;
  sq.cols = 2;
  EXPECT_EQ(lattice_hop_distance(build_lattice(sq), NodeId{0}, NodeId{3}), 2u);
  EXPECT_THROW(lattice_hop_distance(net, NodeId{0}, NodeId{12}), std::out_of_range);
}

TEST(LatticeHopDistance, DisconnectedPairRejected) {
  Network net({{NodeId{0}, 1, 1}, {NodeId{1}, 1, 1}});
  EXPECT_THROW(lattice_hop_distance(net, NodeId{0}, NodeId{1}), std::domain_error);
}

// Randomized sends over evolving networks, checked against the outcome and
// log invariants.
TEST(SendQubitProperty, OutcomeInvariants) {
  Rng meta(77);
  for (int trial = 0; trial < 40; ++trial) {
    SimParams p;
    p.rows = 2 + static_cast<int>(meta() % 3);
    p.cols = 2 + static_cast<int>(meta() % 3);
    p.initial_epr = static_cast<int>(meta() % 3);
    p.initial_qubits = static_cast<int>(meta() % 6);
    p.capacity = 6;
    p.p_loss = 0.05 * static_cast<double>(meta() % 4);
    p.p_regen = 0.1 * static_cast<double>(meta() % 5);
    p.gamma = 0.98;
    p.max_recalcs = 1 + static_cast<int>(meta() % 10);
    Rng rng(meta());
    Network net = build_lattice(p, rng);
    InteractionLog log;
    const NodeId dst{net.node_count() - 1};
    const std::size_t d = lattice_hop_distance(net, NodeId{0}, dst);
    for (int q = 0; q < 30; ++q) {
      const std::size_t len = d + 2 * (meta() % 2);
      const Strategy s = all_strategies[meta() % 3];

      // Same snapshot and seed must reproduce the outcome.
      Network snapshot = net;
      const auto seed = meta();
      Rng replay(seed);
      InteractionLog replay_log = log;
      const auto expected = send_qubit(snapshot, NodeId{0}, dst, len, s, p, replay, replay_log);

      Rng live(seed);
      const InteractionLog before = log;
      const auto out = send_qubit(net, NodeId{0}, dst, len, s, p, live, log);
      ASSERT_EQ(out, expected);
      ASSERT_EQ(net, snapshot);

      ASSERT_LE(out.recalculations, static_cast<std::size_t>(p.max_recalcs));
      ASSERT_EQ(out.eprs_created, log.entangle_count - before.entangle_count);
      ASSERT_EQ(out.hops_taken, log.teleport_count - before.teleport_count);
      ASSERT_EQ(out.per_hop_fidelities.size(), out.hops_taken);
      if (out.delivered) {
        double product = 1.0;
        for (double f : out.per_hop_fidelities) product *= f;
        ASSERT_NEAR(out.end_to_end_fidelity, product, 1e-12);
        ASSERT_GE(out.hops_taken, d);
        ASSERT_LE(out.end_to_end_fidelity,
                  *std::min_element(out.per_hop_fidelities.begin(), out.per_hop_fidelities.end()));
      }
    }
  }
}

}  // namespace
}  // namespace qnet
