#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbt/capacity.hpp"
#include "bbt/sim.hpp"
#include "bbt/topology.hpp"

namespace bbt {

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& origin, int line, const std::string& field,
              const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class oracle_mode { off, automatic, on };

struct optimization_section {
  quant_ladder ladder;
  int tx_antennas = 1;
  double tx_power = 1.0;
  double noise_power = 1.0;
  int realizations = 200;
  std::uint64_t seed = 1;
  edge_policy policy = edge_policy::np_fixed_priority;
  oracle_mode oracle = oracle_mode::automatic;
};

/// A fully parsed scenario: one validated topology plus flow list, the
/// simulation controls, and (optionally) the quantization-search inputs.
/// Every physical quantity in the file carries an explicit unit; plain
/// numbers are only accepted for counts, seeds and linear powers.
struct scenario {
  fat_tree_topology topology;
  std::vector<radio_flow> flows;
  std::vector<time_ps> flow_phases;  // per flow, used when phases = explicit

  time_ps horizon = 10 * kPsPerMs;
  phase_mode phases = phase_mode::synchronous;
  std::uint64_t seed = 0;
  int repetitions = 1;
  edge_policy scheduler = edge_policy::np_fixed_priority;
  std::vector<int> sweep_arities;
  time_ps sweep_stagger = 0;  // per-edge start offset for the sweep

  std::optional<optimization_section> optimization;

  sim_config make_sim_config() const;
};

scenario parse_scenario(const std::string& text, const std::string& origin = "<memory>");
scenario load_scenario(const std::string& path);

/// Canonical serialization: fixed section and key order, all quantities in
/// base units (ps, bps, bit, Hz). parse(canonical(s)) reproduces the same
/// model, and the scenario hash is the FNV-1a64 of this text.
std::string canonical_scenario(const scenario& s);
std::uint64_t scenario_hash(const scenario& s);

// Unit-carrying value parsers, exposed for reuse and tests. Each rejects
// unit-less input.
time_ps parse_time(const std::string& text);             // ps ns us ms s
bits_per_sec parse_rate(const std::string& text);        // bps kbps Mbps Gbps Tbps
std::int64_t parse_frequency(const std::string& text);   // Hz kHz MHz GHz
std::int64_t parse_size_bits(const std::string& text);   // bit(s) B KB MB

const char* policy_name(edge_policy p);
edge_policy policy_from_name(const std::string& name);

}  // namespace bbt
