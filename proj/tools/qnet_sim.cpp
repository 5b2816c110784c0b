// Command-line front end for the opportunistic routing simulator.
//
//   qnet_sim run [--config F] [--seed N] [--set k=v]... [--out F] [--raw-out F] [--workers N]
//   qnet_sim single [--config F] [--strategy S] [--length L] [--src A --dst B]
//   qnet_sim topology [--config F] [--out F]

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qnet/cli.hpp"
#include "qnet/dynamics.hpp"
#include "qnet/engine.hpp"
#include "qnet/experiment.hpp"
#include "qnet/topology.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--seed", opts.seed, "seed for both the experiment and single runs");
  cmd->add_option("--set", opts.sets, "override one key, as key=value (repeatable)");
}

qnet::ExperimentConfig load_config(const CommonOptions& opts) {
  std::string text;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file '" + opts.config_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::vector<std::pair<std::string, std::string>> overrides;
  if (opts.seed) {
    overrides.emplace_back("seed", std::to_string(*opts.seed));
    overrides.emplace_back("master_seed", std::to_string(*opts.seed));
  }
  for (const auto& s : opts.sets) overrides.push_back(qnet::split_override(s));
  return qnet::parse_config(text, overrides);
}

// Writes to `path`, or to stdout when the path is empty or "-".
template <typename Write>
void with_sink(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic quantum network routing simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string out_path;
  std::string raw_path;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* run = app.add_subcommand("run", "run the full experiment and emit CSV tables");
  add_common(run, run_opts);
  run->add_option("--out", out_path, "summary CSV path (default stdout)");
  run->add_option("--raw-out", raw_path, "per-replication CSV path");
  run->add_option("--workers", workers, "replication worker threads")->check(CLI::PositiveNumber);

  CommonOptions single_opts;
  std::string strategy_name = "max_fidelity";
  std::size_t length = 4;
  std::optional<std::size_t> src;
  std::optional<std::size_t> dst;
  auto* single = app.add_subcommand("single", "send one qubit and print a hop-by-hop trace");
  add_common(single, single_opts);
  single->add_option("--strategy", strategy_name, "max_fidelity | max_epr | max_qubits");
  single->add_option("--length", length, "route length in edges")->check(CLI::PositiveNumber);
  auto* src_opt = single->add_option("--src", src, "source node (default: node 0)");
  auto* dst_opt = single->add_option("--dst", dst, "destination node (default: chosen for --length)");
  src_opt->needs(dst_opt);

  CommonOptions topo_opts;
  std::string topo_out;
  auto* topology = app.add_subcommand("topology", "dump the generated network");
  add_common(topology, topo_opts);
  topology->add_option("--out", topo_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = load_config(run_opts);
      const auto table = qnet::run_experiment(config, workers);
      with_sink(out_path, [&](std::ostream& os) { qnet::write_table_csv(table, os); });
      if (!raw_path.empty()) {
        with_sink(raw_path, [&](std::ostream& os) { qnet::emit_raw_replications(table, os); });
      }
    } else if (*single) {
      const auto config = load_config(single_opts);
      const auto strategy = qnet::parse_strategy(strategy_name);
      if (!strategy) throw std::runtime_error("unknown strategy '" + strategy_name + "'");
      qnet::Rng rng(config.sim.seed);
      qnet::Network net = qnet::build_lattice(config.sim, rng);
      qnet::Endpoints ends{qnet::NodeId{0}, qnet::NodeId{0}};
      if (dst) {
        ends = {qnet::NodeId{src.value_or(0)}, qnet::NodeId{*dst}};
      } else {
        ends = qnet::endpoints_for_length(net, length);
      }
      qnet::InteractionLog log;
      std::cout << "strategy " << qnet::to_string(*strategy) << ", " << ends.src.index << " -> "
                << ends.dst.index << ", length " << length << '\n';
      qnet::send_qubit(net, ends.src, ends.dst, length, *strategy, config.sim, rng, log,
                       qnet::TraceObserver(std::cout));
    } else if (*topology) {
      const auto config = load_config(topo_opts);
      const auto net = qnet::build_lattice(config.sim);
      with_sink(topo_out, [&](std::ostream& os) { qnet::write_topology(net, os); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
