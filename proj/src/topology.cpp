#include "bbt/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bbt {

int fat_tree_topology::num_edges() const {
  std::int64_t k = 1;
  for (int j = 0; j < height; ++j) {
    k *= arity;
    if (k > 1'000'000) throw std::invalid_argument("tree too large (q^h over 1e6 edges)");
  }
  return static_cast<int>(k);
}

int fat_tree_topology::num_radios() const {
  int n = 0;
  for (const auto& e : edge_radios) n += static_cast<int>(e.size());
  return n;
}

time_ps fat_tree_topology::tx_time(int level) const {
  if (level < 1 || level > height + 1) throw std::invalid_argument("link level out of range");
  return inter_arrival(packet_bits, link_caps.at(static_cast<std::size_t>(level - 1)));
}

time_ps fat_tree_topology::background_tx(int level) const {
  if (!background) return 0;
  const bool on_edge = level == 1;
  const bool applies = background->where == background_spec::attach::everywhere ||
                       (on_edge ? background->where == background_spec::attach::edge
                                : background->where == background_spec::attach::aggregation);
  if (!applies) return 0;
  return inter_arrival(background->packet_bits, link_caps.at(static_cast<std::size_t>(level - 1)));
}

std::vector<topology_violation> validate_topology(const fat_tree_topology& t,
                                                  std::span<const radio_flow> flows) {
  std::vector<topology_violation> out;
  auto add = [&out](std::string req, std::string detail) {
    out.push_back({std::move(req), std::move(detail)});
  };

  if (t.arity < 1) add("symmetric", "tree arity must be at least 1");
  if (t.height < 1) add("symmetric", "aggregation height must be at least 1");
  if (t.packet_bits <= 0) add("equal-packet-sizes", "network packet size must be positive");
  if (t.switch_delay < 0 || t.prop_delay < 0) add("symmetric", "switch/propagation delays must be non-negative");

  if (static_cast<int>(t.link_caps.size()) != t.height + 1) {
    std::ostringstream os;
    os << "expected " << t.height + 1 << " link capacities (levels 1.." << t.height + 1
       << "), got " << t.link_caps.size();
    add("symmetric", os.str());
    return out;  // level-indexed checks below need the full ladder
  }
  for (std::size_t i = 0; i < t.link_caps.size(); ++i) {
    if (t.link_caps[i] <= 0) {
      std::ostringstream os;
      os << "level " << i + 1 << " capacity must be positive";
      add("symmetric", os.str());
      return out;
    }
  }

  // Fat-Tree: uplink capacity at least the sum of the q incoming links,
  // i.e. C_{j+1} <= C_j / q for every aggregation level.
  for (int j = 1; j <= t.height; ++j) {
    const bits_per_sec in = t.link_caps[static_cast<std::size_t>(j - 1)];
    const bits_per_sec up = t.link_caps[static_cast<std::size_t>(j)];
    if (static_cast<__int128>(in) * t.arity > up) {
      std::ostringstream os;
      os << "level " << j + 1 << ": uplink " << up << " b/s is below " << t.arity
         << " x " << in << " b/s of incoming traffic";
      add("fat-tree", os.str());
    }
  }

  if (t.background && t.background->packet_bits <= 0) {
    add("non-preemptive", "background packet size must be positive");
  }

  if (!flows.empty()) {
    const int k = t.num_edges();
    std::set<int> seen;
    for (const auto& f : flows) {
      if (f.payload_bits != t.packet_bits) {
        std::ostringstream os;
        os << "flow " << f.id << " uses " << f.payload_bits << " bit packets, network uses "
           << t.packet_bits;
        add("equal-packet-sizes", os.str());
      }
      if (f.edge < 0 || f.edge >= k) {
        std::ostringstream os;
        os << "flow " << f.id << " assigned to edge " << f.edge << ", valid range is 0.."
           << k - 1;
        add("symmetric", os.str());
      }
      if (!seen.insert(f.id).second) {
        std::ostringstream os;
        os << "duplicate flow id " << f.id;
        add("symmetric", os.str());
      }
      if (t.source_link && f.rate > *t.source_link) {
        std::ostringstream os;
        os << "flow " << f.id << " rate exceeds the source link capacity";
        add("fat-tree", os.str());
      }
    }
  }
  return out;
}

time_ps max_queuing_per_hop(const fat_tree_topology& t, int level) {
  if (level < 1 || level > t.height) throw std::invalid_argument("aggregation level out of range");
  const bits_per_sec cap = t.link_caps.at(static_cast<std::size_t>(level));
  // (q-1) * C_{level+1}, exact then rounded up once
  const time_ps base =
      mul_div_ceil(static_cast<std::int64_t>(t.arity - 1) * t.packet_bits, kPsPerSec, cap);
  return base + t.background_tx(level + 1);
}

namespace {

// ceil of C_1 * (1 - q^-h) / (1 - q^-1) = C_1 * q (q^h - 1) / (q^h (q - 1)),
// with C_1 = B/cap_1 kept rational; the degenerate q = 1 chain sums to h*C_1.
time_ps geometric_c1_term(const fat_tree_topology& t) {
  const __int128 b_ps = static_cast<__int128>(t.packet_bits) * kPsPerSec;
  const __int128 cap1 = t.link_caps.at(0);
  if (t.arity == 1) {
    const __int128 num = b_ps * t.height;
    return static_cast<time_ps>((num + cap1 - 1) / cap1);
  }
  __int128 qh = 1;
  for (int j = 0; j < t.height; ++j) qh *= t.arity;
  const __int128 num = b_ps * t.arity * (qh - 1);
  const __int128 den = cap1 * qh * (t.arity - 1);
  return static_cast<time_ps>((num + den - 1) / den);
}

}  // namespace

time_ps aggregation_delay_bound(const fat_tree_topology& t) {
  const auto violations = validate_topology(t);
  if (!violations.empty()) {
    throw std::invalid_argument("topology violates design requirements: " +
                                violations.front().detail);
  }
  time_ps bound = t.height * (t.switch_delay + t.prop_delay) + geometric_c1_term(t);
  for (int j = 1; j <= t.height; ++j) bound += t.background_tx(j + 1);

  // Scalability corollary: the geometric term never exceeds 2*C_1 for q >= 2.
  if (t.arity >= 2) {
    const time_ps c1 = t.tx_time(1);
    if (geometric_c1_term(t) > 2 * c1 + 1) {
      throw std::logic_error("aggregation bound exceeded its scalability envelope");
    }
  }
  return bound;
}

delay_budget compute_delay_budget(const fat_tree_topology& t,
                                  std::span<const radio_flow> flows) {
  delay_budget b;
  b.agg_bound = aggregation_delay_bound(t);
  b.edge_budget = geometric_c1_term(t) +
                  (t.height + 1) * (t.switch_delay + t.prop_delay);
  for (int j = 1; j <= t.height; ++j) b.edge_budget += t.background_tx(j + 1);
  if (t.source_link) {
    // the radio->edge hop adds its transmission and propagation ahead of
    // the edge queue
    b.edge_budget += inter_arrival(t.packet_bits, *t.source_link) + t.prop_delay;
  }
  for (const auto& f : flows) {
    b.edge_deadlines[f.id] = f.deadline - b.edge_budget;
  }
  return b;
}

bool e2e_result::schedulable() const {
  if (!infeasible_flows.empty()) return false;
  return std::all_of(per_edge.begin(), per_edge.end(),
                     [](const edge_verdict& v) { return v.verdict.schedulable; });
}

e2e_result e2e_schedulable(const fat_tree_topology& t, std::span<const radio_flow> flows,
                           edge_policy policy, const sched_limits& limits) {
  if (policy == edge_policy::fifo) {
    throw std::invalid_argument("no local schedulability test exists for FIFO edges");
  }
  const auto violations = validate_topology(t, flows);
  if (!violations.empty()) {
    throw std::invalid_argument("topology violates design requirements: " +
                                violations.front().detail);
  }

  e2e_result res;
  res.budget = compute_delay_budget(t, flows);

  const time_ps c1 = t.tx_time(1);
  const time_ps bg1 = t.background_tx(1);

  std::map<int, std::vector<const radio_flow*>> by_edge;
  for (const auto& f : flows) by_edge[f.edge].push_back(&f);

  for (auto& [edge, members] : by_edge) {
    flow_set fs;
    std::vector<int> ids;
    bool feasible = true;
    for (const radio_flow* f : members) {
      const time_ps local = res.budget.edge_deadlines.at(f->id);
      if (local <= 0) {
        res.infeasible_flows.push_back(f->id);
        feasible = false;
        continue;
      }
      fs.flows.push_back({f->period(), local, c1});
      ids.push_back(f->id);
    }
    if (!feasible) {
      res.per_edge.push_back({edge, {false, std::nullopt, false, horizon_kind::none}, ids});
      continue;
    }
    if (bg1 > c1) fs.np_blocking = bg1;

    sched_verdict v;
    if (policy == edge_policy::np_fixed_priority) {
      // priorities by inverse period (rate-monotonic), ties by flow id order
      std::vector<std::size_t> order(fs.flows.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&fs](std::size_t a, std::size_t b) {
        return fs.flows[a].period < fs.flows[b].period;
      });
      flow_set sorted;
      sorted.np_blocking = fs.np_blocking;
      std::vector<int> sorted_ids;
      for (const std::size_t i : order) {
        sorted.flows.push_back(fs.flows[i]);
        sorted_ids.push_back(ids[i]);
      }
      v = fixed_priority_test(sorted, /*preemptive=*/false, limits);
      ids = std::move(sorted_ids);
    } else {
      v = edf_test(fs, /*preemptive=*/false, limits);
    }
    res.per_edge.push_back({edge, v, ids});
  }
  std::sort(res.infeasible_flows.begin(), res.infeasible_flows.end());
  return res;
}

}  // namespace bbt
