#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbt/sched.hpp"
#include "bbt/time.hpp"
#include "bbt/traffic.hpp"

namespace bbt {

/// Saturating lower-priority traffic attached to switches: one source per
/// configured switch, kept in a queue below the baseband class.
struct background_spec {
  std::int64_t packet_bits = 0;
  enum class attach { edge, aggregation, everywhere } where = attach::aggregation;

  bool operator==(const background_spec&) const = default;
};

/// q-ary symmetric aggregation tree. Links are numbered by level: level 1
/// is the edge uplink, level h+1 the root-to-destination link; all links of
/// one level share a capacity (symmetry by construction). Edge switches sit
/// at the leaves; radios attach to them through `edge_radios`. `h = 1`
/// means a single aggregation switch.
struct fat_tree_topology {
  int arity = 2;                           // q
  int height = 1;                          // h aggregation levels
  std::vector<bits_per_sec> link_caps;     // levels 1..h+1
  time_ps switch_delay = 0;                // t_s
  time_ps prop_delay = 0;                  // t_p
  std::int64_t packet_bits = 0;            // B
  std::vector<std::vector<int>> edge_radios;  // radio ids per edge switch
  std::optional<bits_per_sec> source_link;    // radio->edge hop, if modeled
  std::optional<background_spec> background;

  int num_edges() const;    // q^h
  int num_radios() const;

  /// Packet transmission time on a link level (1..h+1), round half-up.
  time_ps tx_time(int level) const;

  /// Background packet transmission time on a link level, 0 when absent.
  time_ps background_tx(int level) const;

  bool operator==(const fat_tree_topology&) const = default;
};

struct topology_violation {
  std::string requirement;  // "fat-tree", "symmetric", "non-preemptive", "equal-packet-sizes", ...
  std::string detail;
};

/// Checks the design requirements. With flows supplied, also checks the
/// equal-packet-size requirement and the edge-assignment partition.
/// Violations are data, not exceptions.
std::vector<topology_violation> validate_topology(const fat_tree_topology& t,
                                                  std::span<const radio_flow> flows = {});

/// Worst queuing at aggregation level j (1..h): (q-1) * C_{j+1}, plus one
/// background transmission when background traffic rides that hop.
time_ps max_queuing_per_hop(const fat_tree_topology& t, int level);

/// Closed-form bound on the delay any packet accumulates from its arrival
/// at the first aggregation switch through delivery:
///   h*(t_s + t_p) + (1 - q^-h) / (1 - q^-1) * C_1
/// evaluated in exact rational arithmetic with one final upward rounding.
time_ps aggregation_delay_bound(const fat_tree_topology& t);

struct delay_budget {
  time_ps agg_bound = 0;       // aggregation-network delay bound
  time_ps edge_budget = 0;     // subtracted from every D_i to get d_i'
  std::map<int, time_ps> edge_deadlines;  // flow id -> d_i' (may be <= 0)
};

/// Budget split used by the end-to-end reduction; `edge_budget` accounts
/// the aggregation bound plus (h+1)(t_s+t_p) for the edge switch itself and
/// the source hop when one is modeled.
delay_budget compute_delay_budget(const fat_tree_topology& t,
                                  std::span<const radio_flow> flows);

enum class edge_policy { fifo, np_edf, np_fixed_priority };

struct edge_verdict {
  int edge = 0;
  sched_verdict verdict;
  std::vector<int> flow_ids;  // priority order used for the test
};

struct e2e_result {
  delay_budget budget;
  std::vector<edge_verdict> per_edge;
  std::vector<int> infeasible_flows;  // flows with d_i' <= 0
  bool schedulable() const;
};

/// Reduces end-to-end schedulability to one local test per edge switch:
/// flows at edge k are tested as (T_i, d_i') with transmission time C_1
/// under the chosen non-preemptive policy. FIFO is rejected (no local test
/// exists for it).
e2e_result e2e_schedulable(const fat_tree_topology& t,
                           std::span<const radio_flow> flows, edge_policy policy,
                           const sched_limits& limits = {});

}  // namespace bbt
