#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "qnet/engine.hpp"
#include "qnet/experiment.hpp"
#include "qnet/routing.hpp"
#include "qnet/topology.hpp"

namespace qnet {

// Configuration error. `line` is the 1-based file line, or 0 when the
// offending value came from a command-line override or a default.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    items.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Throws std::invalid_argument with a description on a type mismatch.
using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

template <typename T>
Setter number_setter(T SimParams::*field) {
  return [field](ExperimentConfig& c, std::string_view v) {
    T value{};
    if (!parse_number(v, value)) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
    c.sim.*field = value;
  };
}

template <typename T>
Setter number_setter(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view v) {
    T value{};
    if (!parse_number(v, value)) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
    c.*field = value;
  };
}

inline const std::map<std::string, Setter, std::less<>>& config_setters() {
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"rows", number_setter(&SimParams::rows)},
      {"cols", number_setter(&SimParams::cols)},
      {"initial_qubits", number_setter(&SimParams::initial_qubits)},
      {"capacity", number_setter(&SimParams::capacity)},
      {"initial_epr", number_setter(&SimParams::initial_epr)},
      {"fidelity_low", number_setter(&SimParams::fidelity_low)},
      {"fidelity_high", number_setter(&SimParams::fidelity_high)},
      {"f_min", number_setter(&SimParams::f_min)},
      {"gamma", number_setter(&SimParams::gamma)},
      {"p_loss", number_setter(&SimParams::p_loss)},
      {"p_regen", number_setter(&SimParams::p_regen)},
      {"max_recalcs", number_setter(&SimParams::max_recalcs)},
      {"seed", number_setter(&SimParams::seed)},
      {"qubits_per_run", number_setter(&ExperimentConfig::qubits_per_run)},
      {"replications", number_setter(&ExperimentConfig::replications)},
      {"master_seed", number_setter(&ExperimentConfig::master_seed)},
      {"route_lengths",
       [](ExperimentConfig& c, std::string_view v) {
         std::vector<std::size_t> lengths;
         for (auto item : split_list(v)) {
           std::size_t len = 0;
           if (!parse_number(item, len)) {
             throw std::invalid_argument("expected a comma-separated list of lengths, got '" +
                                         std::string(v) + "'");
           }
           lengths.push_back(len);
         }
         c.route_lengths = std::move(lengths);
       }},
      {"strategies",
       [](ExperimentConfig& c, std::string_view v) {
         std::vector<Strategy> strategies;
         for (auto item : split_list(v)) {
           const auto s = parse_strategy(item);
           if (!s) throw std::invalid_argument("unknown strategy '" + std::string(item) + "'");
           strategies.push_back(*s);
         }
         c.strategies = std::move(strategies);
       }},
  };
  return setters;
}

}  // namespace detail

// `key = value` lines with `#` comments. Defaults, then file values, then
// overrides (applied in order). Unknown keys, malformed lines, bad values and
// violated invariants raise ConfigError.
inline ExperimentConfig parse_config(std::string_view text,
                                     const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  ExperimentConfig config;
  std::map<std::string, std::size_t, std::less<>> assigned_at;  // key -> line, 0 for overrides
  const auto& setters = detail::config_setters();

  auto apply = [&](std::string_view key, std::string_view value, std::size_t line) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(line, "unknown key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(line, "missing value for '" + std::string(key) + "'");
    try {
      it->second(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, std::string(key) + ": " + e.what());
    }
    assigned_at[std::string(key)] = line;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    apply(key, detail::trim(line.substr(eq + 1)), line_no);
  }

  for (const auto& [key, value] : overrides) {
    try {
      apply(detail::trim(key), detail::trim(value), 0);
    } catch (const ConfigError& e) {
      throw ConfigError(0, "override: " + std::string(e.what()));
    }
  }

  if (auto violation = check_config(config)) {
    // Blame the most recently assigned field involved in the violation.
    std::size_t line = 0;
    for (const auto& field : violation->fields) {
      const auto it = assigned_at.find(field);
      if (it != assigned_at.end() && it->second > line) line = it->second;
    }
    throw ConfigError(line, violation->message);
  }
  return config;
}

// Splits a `key=value` override flag.
inline std::pair<std::string, std::string> split_override(std::string_view flag) {
  const auto eq = flag.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(0, "override '" + std::string(flag) + "' is not of the form key=value");
  }
  return {std::string(detail::trim(flag.substr(0, eq))), std::string(detail::trim(flag.substr(eq + 1)))};
}

// Inverse of parse_config: every key, values in round-trip precision.
inline std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const SimParams& p = c.sim;
  os << "rows = " << p.rows << '\n'
     << "cols = " << p.cols << '\n'
     << "initial_qubits = " << p.initial_qubits << '\n'
     << "capacity = " << p.capacity << '\n'
     << "initial_epr = " << p.initial_epr << '\n'
     << "fidelity_low = " << detail::shortest(p.fidelity_low) << '\n'
     << "fidelity_high = " << detail::shortest(p.fidelity_high) << '\n'
     << "f_min = " << detail::shortest(p.f_min) << '\n'
     << "gamma = " << detail::shortest(p.gamma) << '\n'
     << "p_loss = " << detail::shortest(p.p_loss) << '\n'
     << "p_regen = " << detail::shortest(p.p_regen) << '\n'
     << "max_recalcs = " << p.max_recalcs << '\n'
     << "seed = " << p.seed << '\n'
     << "qubits_per_run = " << c.qubits_per_run << '\n'
     << "replications = " << c.replications << '\n'
     << "master_seed = " << c.master_seed << '\n';
  os << "route_lengths = ";
  for (std::size_t i = 0; i < c.route_lengths.size(); ++i) os << (i ? "," : "") << c.route_lengths[i];
  os << "\nstrategies = ";
  for (std::size_t i = 0; i < c.strategies.size(); ++i) os << (i ? "," : "") << to_string(c.strategies[i]);
  os << '\n';
  return os.str();
}

// Fixed-point, six decimals, independent of the stream's locale.
inline std::string fixed6(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

inline constexpr std::string_view summary_csv_header =
    "strategy,route_length,mean_fidelity,std_fidelity,mean_epr_per_qubit,std_epr_per_qubit,"
    "mean_recalc_per_qubit,std_recalc_per_qubit,delivery_rate";

inline constexpr std::string_view raw_csv_header =
    "strategy,route_length,replication,mean_fidelity,epr_per_qubit,recalc_per_qubit,delivery_rate";

namespace detail {
inline void check_sink(const std::ostream& sink) {
  if (!sink) throw std::runtime_error("failed to write CSV output");
}
}  // namespace detail

inline void write_table_csv(const ExperimentTable& table, std::ostream& sink) {
  sink << summary_csv_header << '\n';
  for (const auto& row : table.rows) {
    sink << to_string(row.strategy) << ',' << row.route_length << ',' << fixed6(row.fidelity.mean)
         << ',' << fixed6(row.fidelity.std) << ',' << fixed6(row.epr_per_qubit.mean) << ','
         << fixed6(row.epr_per_qubit.std) << ',' << fixed6(row.recalc_per_qubit.mean) << ','
         << fixed6(row.recalc_per_qubit.std) << ',' << fixed6(row.delivery_rate.mean) << '\n';
  }
  sink.flush();
  detail::check_sink(sink);
}

inline void emit_raw_replications(const ExperimentTable& table, std::ostream& sink) {
  sink << raw_csv_header << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.replications.size(); ++i) {
      const auto& r = row.replications[i];
      sink << to_string(row.strategy) << ',' << row.route_length << ',' << i << ','
           << fixed6(r.mean_delivered_fidelity) << ',' << fixed6(r.epr_per_qubit) << ','
           << fixed6(r.recalc_per_qubit) << ',' << fixed6(r.delivery_rate) << '\n';
    }
  }
  sink.flush();
  detail::check_sink(sink);
}

inline std::string format_route(const Route& r) {
  std::string s;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    if (i) s += " -> ";
    s += std::to_string(r.nodes[i].index);
  }
  return s;
}

// Human-readable hop-by-hop trace for the `single` subcommand.
class TraceObserver : public TransmissionObserver {
 public:
  explicit TraceObserver(std::ostream& os) : os_(os) {}

  void route_selected(const Route& r, bool recalculated) {
    os_ << (recalculated ? "recalculated route: " : "route: ") << format_route(r) << " ("
        << r.edge_count() << " edges)\n";
  }
  void epr_created(NodeId a, NodeId b) {
    os_ << "  epr created on " << a.index << "-" << b.index << '\n';
  }
  void epr_creation_failed(NodeId a, NodeId b, ResourceStatus s) {
    os_ << "  epr creation failed on " << a.index << "-" << b.index << ": " << to_string(s) << '\n';
  }
  void hop(NodeId a, NodeId b, double f) {
    os_ << "  hop " << a.index << " -> " << b.index << " fidelity " << fixed6(f) << '\n';
  }
  void recalculation(std::size_t count, NodeId at) {
    os_ << "  recalculation #" << count << " from node " << at.index << '\n';
  }
  void undelivered(UndeliveredReason why) { os_ << "undelivered: " << to_string(why) << '\n'; }
  void delivered(const TransmissionOutcome& out) {
    os_ << "delivered: fidelity " << fixed6(out.end_to_end_fidelity) << ", hops " << out.hops_taken
        << ", eprs created " << out.eprs_created << ", recalculations " << out.recalculations << '\n';
  }

 private:
  std::ostream& os_;
};

inline void write_topology(const Network& net, std::ostream& os) {
  os << "nodes " << net.node_count() << " channels " << net.channel_count() << '\n';
  for (const auto& n : net.nodes()) {
    os << "node " << n.id.index << " free_qubits " << n.free_qubits << " capacity " << n.capacity
       << '\n';
  }
  for (const auto& c : net.channels()) {
    os << "channel " << c.a.index << ' ' << c.b.index << " epr " << c.epr_count << " fidelity "
       << fixed6(c.fidelity) << '\n';
  }
}

}  // namespace qnet
