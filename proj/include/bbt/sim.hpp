#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbt/time.hpp"
#include "bbt/topology.hpp"
#include "bbt/traffic.hpp"

namespace bbt {

enum class phase_mode { synchronous, seeded_random, explicit_list };

struct sim_config {
  time_ps horizon = 10 * kPsPerMs;
  phase_mode phases = phase_mode::synchronous;
  std::vector<time_ps> phase_list;  // used with explicit_list, one per flow
  std::uint64_t seed = 0;
  bool record_packets = false;
  std::size_t queue_cap = 1'000'000;
};

/// Per-flow source phases; seeded_random draws uniformly in [0, T_i).
std::vector<time_ps> make_phases(std::span<const radio_flow> flows, phase_mode mode,
                                 std::uint64_t seed,
                                 const std::vector<time_ps>& explicit_list = {});

struct sim_flow_stats {
  int flow = 0;
  bits_per_sec rate = 0;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t missed = 0;    // delivered later than gen + D (packets are never dropped)
  time_ps max_delay = 0;
  time_ps min_delay = 0;
  time_ps jitter = 0;         // max_delay - min_delay
  time_ps max_post_edge = 0;  // delivery minus arrival at the first aggregation switch

  bool operator==(const sim_flow_stats&) const = default;
};

struct packet_record {
  int flow = 0;
  std::int64_t seq = 0;
  time_ps gen = 0;
  time_ps enq_edge = 0;   // entry into the edge egress queue
  time_ps dep_edge = 0;   // edge transmission complete
  time_ps arr_agg = 0;    // ingress at the first aggregation switch
  time_ps delivered = 0;

  bool operator==(const packet_record&) const = default;
};

struct sim_trace {
  std::vector<sim_flow_stats> flows;
  /// Worst observed egress queuing per switch level (0 = edge, j = the
  /// aggregation switch whose uplink is link j+1).
  std::vector<time_ps> max_queuing_by_level;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t in_flight = 0;
  std::vector<packet_record> packets;  // only with record_packets
  std::vector<std::string> warnings;

  bool operator==(const sim_trace&) const = default;
};

class sim_overload_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic packet-level simulation of the fat tree: edge switches run
/// the configured scheduler, aggregation switches run FIFO, transmissions
/// are never preempted. Each hop applies switching delay, queuing,
/// transmission, then propagation. Identical inputs produce identical
/// traces.
sim_trace run_simulation(const fat_tree_topology& topo, std::span<const radio_flow> flows,
                         edge_policy scheduler, const sim_config& cfg);

struct sweep_point {
  int q = 0;
  int radios = 0;
  time_ps max_delay = 0;  // worst end-to-end delay over all flows
  sim_trace trace;
};

/// Scaling sweep: for each arity q, replicates the per-edge flow mix on a
/// tree with q^h edges (link capacities from `base`) and reports the worst
/// observed delay. A non-zero `edge_stagger` offsets every flow of edge e
/// by e * stagger (mod its period) — the fixed-offsets start pattern where
/// edge sites come up one after another instead of in lockstep.
std::vector<sweep_point> sweep_scale(const fat_tree_topology& base,
                                     std::span<const int> arities,
                                     std::span<const radio_flow> per_edge_mix,
                                     edge_policy scheduler, const sim_config& cfg,
                                     time_ps edge_stagger = 0);

}  // namespace bbt
