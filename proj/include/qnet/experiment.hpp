#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qnet/dynamics.hpp"
#include "qnet/engine.hpp"
#include "qnet/random.hpp"
#include "qnet/routing.hpp"
#include "qnet/topology.hpp"

namespace qnet {

struct ExperimentConfig {
  SimParams sim;
  std::size_t qubits_per_run = 100;
  std::size_t replications = 100;
  std::vector<std::size_t> route_lengths = {2, 3, 4, 5, 6, 7, 8};
  std::vector<Strategy> strategies = {all_strategies[0], all_strategies[1], all_strategies[2]};
  std::uint64_t master_seed = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline std::optional<ParamViolation> check_config(const ExperimentConfig& c) {
  if (auto err = check_params(c.sim)) return err;
  auto fail = [](std::string msg, std::string field) {
    return std::optional<ParamViolation>(ParamViolation{std::move(msg), {std::move(field)}});
  };
  if (c.qubits_per_run == 0) return fail("qubits_per_run must be positive", "qubits_per_run");
  if (c.replications == 0) return fail("replications must be positive", "replications");
  if (c.route_lengths.empty()) return fail("route_lengths must not be empty", "route_lengths");
  if (std::find(c.route_lengths.begin(), c.route_lengths.end(), 0u) != c.route_lengths.end()) {
    return fail("route lengths must be positive", "route_lengths");
  }
  if (c.strategies.empty()) return fail("strategies must not be empty", "strategies");
  return std::nullopt;
}

inline void validate(const ExperimentConfig& c) {
  if (auto err = check_config(c)) throw std::invalid_argument(err->message);
}

struct ReplicationResult {
  double mean_delivered_fidelity = 0.0;  // 0 when nothing was delivered
  double epr_per_qubit = 0.0;
  double recalc_per_qubit = 0.0;
  double delivery_rate = 0.0;

  friend bool operator==(const ReplicationResult&, const ReplicationResult&) = default;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;

  friend bool operator==(const Stat&, const Stat&) = default;
};

// Arithmetic mean and sample (n - 1) standard deviation; std is 0 for n = 1.
inline Stat mean_std(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_std of an empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

struct ExperimentRow {
  Strategy strategy = Strategy::max_fidelity;
  std::size_t route_length = 0;
  // Fidelity statistics cover only replications that delivered at least one qubit.
  Stat fidelity;
  Stat epr_per_qubit;
  Stat recalc_per_qubit;
  Stat delivery_rate;
  std::vector<ReplicationResult> replications;

  friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;

  friend bool operator==(const ExperimentTable&, const ExperimentTable&) = default;
};

struct Endpoints {
  NodeId src;
  NodeId dst;
};

// Source is node 0; destination is the farthest node whose distance does not
// exceed edge_len and has the same parity, smallest index on ties. On a
// bipartite lattice that parity is what lets an exact-length simple path exist.
inline Endpoints endpoints_for_length(const Network& net, std::size_t edge_len) {
  const NodeId src{0};
  const auto dist = hop_distances_from(net, src);
  std::optional<NodeId> best;
  std::size_t best_dist = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const std::size_t d = dist[i];
    if (d == unreachable || d == 0 || d > edge_len || (edge_len - d) % 2 != 0) continue;
    if (!best || d > best_dist) {
      best = NodeId{i};
      best_dist = d;
    }
  }
  if (!best) throw std::invalid_argument("no destination compatible with route length " +
                                         std::to_string(edge_len));
  return {src, *best};
}

inline std::uint64_t replication_seed(std::uint64_t master_seed, Strategy strategy,
                                      std::size_t edge_len, std::size_t rep_index) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(strategy) + 1,
                  static_cast<std::uint64_t>(edge_len), static_cast<std::uint64_t>(rep_index));
}

// One independent batch: a fresh lattice, then qubits_per_run sequential sends
// over the same evolving network.
inline ReplicationResult run_replication(const ExperimentConfig& config, Strategy strategy,
                                         std::size_t edge_len, std::size_t rep_index) {
  validate(config);
  if (rep_index >= config.replications) throw std::out_of_range("replication index out of range");

  Rng rng(replication_seed(config.master_seed, strategy, edge_len, rep_index));
  Network net = build_lattice(config.sim, rng);
  const Endpoints ends = endpoints_for_length(net, edge_len);
  InteractionLog log;

  std::size_t delivered = 0;
  double fidelity_sum = 0.0;
  std::size_t eprs = 0;
  std::size_t recalcs = 0;
  for (std::size_t q = 0; q < config.qubits_per_run; ++q) {
    const auto out = send_qubit(net, ends.src, ends.dst, edge_len, strategy, config.sim, rng, log);
    eprs += out.eprs_created;
    recalcs += out.recalculations;
    if (out.delivered) {
      ++delivered;
      fidelity_sum += out.end_to_end_fidelity;
    }
  }

  const auto n = static_cast<double>(config.qubits_per_run);
  ReplicationResult r;
  r.mean_delivered_fidelity = delivered > 0 ? fidelity_sum / static_cast<double>(delivered) : 0.0;
  r.epr_per_qubit = static_cast<double>(eprs) / n;
  r.recalc_per_qubit = static_cast<double>(recalcs) / n;
  r.delivery_rate = static_cast<double>(delivered) / n;
  return r;
}

inline ExperimentRow summarize(Strategy strategy, std::size_t route_length,
                               std::vector<ReplicationResult> reps) {
  ExperimentRow row;
  row.strategy = strategy;
  row.route_length = route_length;
  std::vector<double> fid, epr, recalc, rate;
  for (const auto& r : reps) {
    if (r.delivery_rate > 0.0) fid.push_back(r.mean_delivered_fidelity);
    epr.push_back(r.epr_per_qubit);
    recalc.push_back(r.recalc_per_qubit);
    rate.push_back(r.delivery_rate);
  }
  if (!fid.empty()) row.fidelity = mean_std(fid);
  row.epr_per_qubit = mean_std(epr);
  row.recalc_per_qubit = mean_std(recalc);
  row.delivery_rate = mean_std(rate);
  row.replications = std::move(reps);
  return row;
}

// Rows are strategies in declared order, then lengths ascending. Replications
// are distributed over `workers` threads; results land in fixed slots, so the
// table does not depend on the worker count.
inline ExperimentTable run_experiment(const ExperimentConfig& config, unsigned workers = 1) {
  validate(config);
  std::vector<std::size_t> lengths = config.route_lengths;
  std::sort(lengths.begin(), lengths.end());

  struct Job {
    Strategy strategy;
    std::size_t length;
  };
  std::vector<Job> combos;
  for (Strategy s : config.strategies) {
    for (std::size_t len : lengths) combos.push_back({s, len});
  }

  const std::size_t reps = config.replications;
  const std::size_t total = combos.size() * reps;
  std::vector<ReplicationResult> results(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      try {
        const Job& c = combos[job / reps];
        results[job] = run_replication(config, c.strategy, c.length, job % reps);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentTable table;
  table.rows.reserve(combos.size());
  for (std::size_t i = 0; i < combos.size(); ++i) {
    const auto first = results.begin() + static_cast<std::ptrdiff_t>(i * reps);
    table.rows.push_back(summarize(combos[i].strategy, combos[i].length,
                                   {first, first + static_cast<std::ptrdiff_t>(reps)}));
  }
  return table;
}

}  // namespace qnet
