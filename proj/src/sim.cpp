#include "bbt/sim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <sstream>

#include "bbt/rng.hpp"

namespace bbt {

std::vector<time_ps> make_phases(std::span<const radio_flow> flows, phase_mode mode,
                                 std::uint64_t seed,
                                 const std::vector<time_ps>& explicit_list) {
  std::vector<time_ps> phases(flows.size(), 0);
  switch (mode) {
    case phase_mode::synchronous:
      break;
    case phase_mode::seeded_random:
      for (std::size_t i = 0; i < flows.size(); ++i) {
        const time_ps period = flows[i].period();
        const std::uint64_t r = keyed_u64(seed, 0x7068617365ull + i);
        phases[i] = static_cast<time_ps>(bounded_u64(r, static_cast<std::uint64_t>(period)));
      }
      break;
    case phase_mode::explicit_list:
      if (explicit_list.size() != flows.size()) {
        throw std::invalid_argument("phase list length must match the flow count");
      }
      phases = explicit_list;
      break;
  }
  return phases;
}

namespace {

// Events at one instant are processed source emissions first (they only
// schedule arrivals), then arrivals, then transmission completions, then
// transmission starts, so every packet admitted at an instant is visible
// before any scheduling decision there; within arrivals the order is level
// descending, switch id, ingress port, flow id.
constexpr int kEmit = 0;
constexpr int kArrival = 1;
constexpr int kComplete = 2;
constexpr int kStart = 3;

struct event {
  time_ps t = 0;
  int kind = kArrival;
  int level = 0;
  int node = 0;
  int port = -1;
  int flow = -1;  // flow id (tie-break), -1 for background
  std::int64_t pkt = -1;
  std::uint64_t serial = 0;
};

struct event_after {
  bool operator()(const event& a, const event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.level != b.level) return a.level < b.level;
    if (a.node != b.node) return a.node > b.node;
    if (a.port != b.port) return a.port > b.port;
    if (a.flow != b.flow) return a.flow > b.flow;
    return a.serial > b.serial;
  }
};

struct packet_state {
  int flow_idx = -1;
  std::int64_t seq = 0;
  time_ps gen = 0;
  time_ps deadline_abs = 0;
  time_ps enqueued_at = 0;  // entry time into the current egress queue
  time_ps enq_edge = 0;
  time_ps dep_edge = 0;
  time_ps arr_agg = 0;
};

struct edf_entry {
  time_ps deadline = 0;
  int flow_id = 0;
  std::int64_t seq = 0;
  std::int64_t pkt = 0;
};

struct edf_after {
  bool operator()(const edf_entry& a, const edf_entry& b) const {
    if (a.deadline != b.deadline) return a.deadline > b.deadline;
    if (a.flow_id != b.flow_id) return a.flow_id > b.flow_id;
    return a.seq > b.seq;
  }
};

struct switch_state {
  int level = 0;
  int node = 0;
  bool busy = false;
  bool bg_enabled = false;
  time_ps tx = 0;     // uplink transmission time
  time_ps bg_tx = 0;  // background packet time on the uplink
  std::deque<std::int64_t> fifo;
  std::vector<std::deque<std::int64_t>> classes;  // fixed-priority, index 0 highest
  std::priority_queue<edf_entry, std::vector<edf_entry>, edf_after> edf;

  std::size_t queued() const {
    if (!classes.empty()) {
      std::size_t n = 0;
      for (const auto& c : classes) n += c.size();
      return n;
    }
    return fifo.size() + edf.size();
  }
};

struct flow_runtime {
  radio_flow flow;
  time_ps period = 0;
  time_ps phase = 0;
  int edge = 0;
  int port = 0;  // position among the radios of its edge switch
  int prio = 0;  // fixed-priority class at its edge, 0 = highest
  std::int64_t next_seq = 0;
};

class simulator {
 public:
  simulator(const fat_tree_topology& topo, std::span<const radio_flow> flows,
            edge_policy scheduler, const sim_config& cfg)
      : topo_(topo), scheduler_(scheduler), cfg_(cfg) {
    const auto violations = validate_topology(topo, flows);
    if (!violations.empty()) {
      throw std::invalid_argument("topology violates design requirements: " +
                                  violations.front().detail);
    }
    const auto phases = make_phases(flows, cfg.phases, cfg.seed, cfg.phase_list);

    flows_.reserve(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
      flow_runtime fr;
      fr.flow = flows[i];
      fr.period = flows[i].period();
      fr.phase = phases[i];
      fr.edge = flows[i].edge;
      flows_.push_back(fr);
      if (cfg.horizon < fr.period) {
        std::ostringstream os;
        os << "horizon is shorter than the period of flow " << flows[i].id
           << "; statistics may be empty";
        warnings_.push_back(os.str());
      }
    }
    stats_.resize(flows_.size());
    gen_by_flow_.assign(flows_.size(), 0);

    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < flows_.size(); ++i) members[flows_[i].edge].push_back(i);
    for (auto& [edge, idxs] : members) {
      for (std::size_t p = 0; p < idxs.size(); ++p) flows_[idxs[p]].port = static_cast<int>(p);
      // rate-monotonic classes, stable for equal periods
      std::vector<std::size_t> order = idxs;
      std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        return flows_[a].period < flows_[b].period;
      });
      for (std::size_t r = 0; r < order.size(); ++r) flows_[order[r]].prio = static_cast<int>(r);
    }

    // q^h edge switches at level 0 shrinking to one root at level h
    levels_.resize(static_cast<std::size_t>(topo.height) + 1);
    std::int64_t count = topo.num_edges();
    for (int l = 0; l <= topo.height; ++l) {
      auto& row = levels_[static_cast<std::size_t>(l)];
      row.resize(static_cast<std::size_t>(count));
      for (std::size_t j = 0; j < row.size(); ++j) {
        auto& sw = row[j];
        sw.level = l;
        sw.node = static_cast<int>(j);
        sw.tx = topo.tx_time(l + 1);
        sw.bg_tx = topo.background_tx(l + 1);
        sw.bg_enabled = sw.bg_tx > 0;
        if (l == 0 && scheduler_ == edge_policy::np_fixed_priority) {
          const auto it = members.find(sw.node);
          sw.classes.resize(it == members.end() ? 0 : it->second.size());
        }
      }
      count /= topo.arity;
    }
    max_wait_.assign(levels_.size(), 0);

    source_hop_ = 0;
    if (topo.source_link) {
      source_hop_ = inter_arrival(topo.packet_bits, *topo.source_link) + topo.prop_delay;
    }
  }

  sim_trace run() {
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      if (flows_[i].phase < cfg_.horizon) {
        push({flows_[i].phase, kEmit, 0, flows_[i].edge, flows_[i].port,
              flows_[i].flow.id, static_cast<std::int64_t>(i), serial_++});
      }
    }
    for (auto& row : levels_) {
      for (auto& sw : row) {
        if (sw.bg_enabled) push({0, kStart, sw.level, sw.node, -1, -1, -1, serial_++});
      }
    }

    while (!queue_.empty() && queue_.top().t <= cfg_.horizon) {
      const event ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case kEmit:
          on_emit(static_cast<std::size_t>(ev.pkt), ev.t);
          break;
        case kArrival:
          on_arrival(ev);
          break;
        case kComplete:
          on_complete(ev);
          break;
        case kStart:
          try_start(at(ev.level, ev.node), ev.t);
          break;
      }
    }
    return collect();
  }

 private:
  switch_state& at(int level, int node) {
    return levels_[static_cast<std::size_t>(level)][static_cast<std::size_t>(node)];
  }

  void push(event ev) { queue_.push(ev); }

  // Source emission: the radio releases one packet and books its next one.
  void on_emit(std::size_t flow_idx, time_ps now) {
    auto& fr = flows_[flow_idx];
    const std::int64_t slot = alloc_packet();
    auto& pkt = pool_[static_cast<std::size_t>(slot)];
    pkt.flow_idx = static_cast<int>(flow_idx);
    pkt.seq = fr.next_seq;
    pkt.gen = now;
    pkt.deadline_abs = now + fr.flow.deadline;
    ++generated_;
    ++gen_by_flow_[flow_idx];
    fr.next_seq++;

    // radio -> edge hop (zero unless a source link is modeled), then the
    // edge switching delay before the packet reaches the egress queue
    push({now + source_hop_ + topo_.switch_delay, kArrival, 0, fr.edge, fr.port,
          fr.flow.id, slot, serial_++});

    const time_ps next = fr.phase + fr.next_seq * fr.period;
    if (next < cfg_.horizon) {
      push({next, kEmit, 0, fr.edge, fr.port, fr.flow.id,
            static_cast<std::int64_t>(flow_idx), serial_++});
    }
  }

  void on_arrival(const event& ev) {
    auto& sw = at(ev.level, ev.node);
    if (sw.queued() >= cfg_.queue_cap) {
      std::ostringstream os;
      os << "queue overflow at level " << ev.level << " switch " << ev.node
         << " (uplink link " << ev.level + 1 << ")";
      throw sim_overload_error(os.str());
    }

    auto& pkt = pool_[static_cast<std::size_t>(ev.pkt)];
    pkt.enqueued_at = ev.t;
    if (ev.level == 0) pkt.enq_edge = ev.t;

    if (ev.level == 0 && scheduler_ == edge_policy::np_fixed_priority) {
      const auto cls = static_cast<std::size_t>(flows_[static_cast<std::size_t>(pkt.flow_idx)].prio);
      sw.classes[cls].push_back(ev.pkt);
    } else if (ev.level == 0 && scheduler_ == edge_policy::np_edf) {
      sw.edf.push({pkt.deadline_abs, flows_[static_cast<std::size_t>(pkt.flow_idx)].flow.id,
                   pkt.seq, ev.pkt});
    } else {
      sw.fifo.push_back(ev.pkt);
    }
    if (!sw.busy) push({ev.t, kStart, sw.level, sw.node, -1, -1, -1, serial_++});
  }

  void try_start(switch_state& sw, time_ps now) {
    if (sw.busy) return;
    std::int64_t next = -1;
    if (!sw.classes.empty()) {
      for (auto& cls : sw.classes) {
        if (!cls.empty()) {
          next = cls.front();
          cls.pop_front();
          break;
        }
      }
    } else if (sw.level == 0 && scheduler_ == edge_policy::np_edf) {
      if (!sw.edf.empty()) {
        next = sw.edf.top().pkt;
        sw.edf.pop();
      }
    } else if (!sw.fifo.empty()) {
      next = sw.fifo.front();
      sw.fifo.pop_front();
    }

    if (next >= 0) {
      auto& pkt = pool_[static_cast<std::size_t>(next)];
      auto& worst = max_wait_[static_cast<std::size_t>(sw.level)];
      worst = std::max(worst, now - pkt.enqueued_at);
      sw.busy = true;
      push({now + sw.tx, kComplete, sw.level, sw.node, -1,
            flows_[static_cast<std::size_t>(pkt.flow_idx)].flow.id, next, serial_++});
    } else if (sw.bg_enabled) {
      sw.busy = true;
      push({now + sw.bg_tx, kComplete, sw.level, sw.node, -1, -1, -1, serial_++});
    }
  }

  void on_complete(const event& ev) {
    auto& sw = at(ev.level, ev.node);
    sw.busy = false;
    if (ev.pkt >= 0) {
      auto& pkt = pool_[static_cast<std::size_t>(ev.pkt)];
      if (ev.level == 0) pkt.dep_edge = ev.t;
      if (ev.level == topo_.height) {
        deliver(ev.pkt, ev.t + topo_.prop_delay);
      } else {
        const int parent = ev.node / topo_.arity;
        const int port = ev.node % topo_.arity;
        if (ev.level == 0) pkt.arr_agg = ev.t + topo_.prop_delay;
        push({ev.t + topo_.prop_delay + topo_.switch_delay, kArrival, ev.level + 1, parent,
              port, ev.flow, ev.pkt, serial_++});
      }
    }
    push({ev.t, kStart, sw.level, sw.node, -1, -1, -1, serial_++});
  }

  void deliver(std::int64_t slot, time_ps when) {
    auto& pkt = pool_[static_cast<std::size_t>(slot)];
    const auto idx = static_cast<std::size_t>(pkt.flow_idx);
    const time_ps delay = when - pkt.gen;
    auto& st = stats_[idx];
    st.delivered++;
    if (when > pkt.deadline_abs) st.missed++;
    st.max_delay = std::max(st.max_delay, delay);
    st.min_delay = st.delivered == 1 ? delay : std::min(st.min_delay, delay);
    st.max_post_edge = std::max(st.max_post_edge, when - pkt.arr_agg);
    ++delivered_;
    if (cfg_.record_packets) {
      records_.push_back({flows_[idx].flow.id, pkt.seq, pkt.gen, pkt.enq_edge, pkt.dep_edge,
                          pkt.arr_agg, when});
    }
    free_packet(slot);
  }

  std::int64_t alloc_packet() {
    if (!free_.empty()) {
      const std::int64_t slot = free_.back();
      free_.pop_back();
      return slot;
    }
    pool_.push_back({});
    return static_cast<std::int64_t>(pool_.size()) - 1;
  }

  void free_packet(std::int64_t slot) { free_.push_back(slot); }

  sim_trace collect() {
    sim_trace tr;
    tr.flows.resize(flows_.size());
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      auto st = stats_[i];
      st.flow = flows_[i].flow.id;
      st.rate = flows_[i].flow.rate;
      st.generated = gen_by_flow_[i];
      st.jitter = st.max_delay - st.min_delay;
      tr.flows[i] = st;
    }
    tr.max_queuing_by_level = max_wait_;
    tr.generated = generated_;
    tr.delivered = delivered_;
    tr.in_flight = generated_ - delivered_;
    tr.packets = std::move(records_);
    tr.warnings = warnings_;
    return tr;
  }

  const fat_tree_topology& topo_;
  edge_policy scheduler_;
  sim_config cfg_;
  std::vector<flow_runtime> flows_;
  std::vector<std::vector<switch_state>> levels_;
  std::priority_queue<event, std::vector<event>, event_after> queue_;
  std::vector<packet_state> pool_;
  std::vector<std::int64_t> free_;
  std::vector<packet_record> records_;
  std::vector<std::string> warnings_;
  std::vector<time_ps> max_wait_;
  std::vector<std::int64_t> gen_by_flow_;
  std::vector<sim_flow_stats> stats_;
  std::int64_t generated_ = 0;
  std::int64_t delivered_ = 0;
  time_ps source_hop_ = 0;
  std::uint64_t serial_ = 0;
};

}  // namespace

sim_trace run_simulation(const fat_tree_topology& topo, std::span<const radio_flow> flows,
                         edge_policy scheduler, const sim_config& cfg) {
  if (cfg.horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (flows.empty()) throw std::invalid_argument("at least one flow is required");
  simulator sim(topo, flows, scheduler, cfg);
  return sim.run();
}

std::vector<sweep_point> sweep_scale(const fat_tree_topology& base,
                                     std::span<const int> arities,
                                     std::span<const radio_flow> per_edge_mix,
                                     edge_policy scheduler, const sim_config& cfg,
                                     time_ps edge_stagger) {
  std::vector<sweep_point> out;
  for (const int q : arities) {
    fat_tree_topology topo = base;
    topo.arity = q;
    const int edges = topo.num_edges();
    topo.edge_radios.assign(static_cast<std::size_t>(edges), {});
    std::vector<radio_flow> flows;
    int next_id = 0;
    for (int e = 0; e < edges; ++e) {
      for (const auto& tmpl : per_edge_mix) {
        radio_flow f = tmpl;
        f.id = next_id++;
        f.edge = e;
        flows.push_back(f);
        topo.edge_radios[static_cast<std::size_t>(e)].push_back(f.id);
      }
    }
    sim_config run_cfg = cfg;
    if (edge_stagger > 0) {
      run_cfg.phases = phase_mode::explicit_list;
      run_cfg.phase_list.clear();
      for (const auto& f : flows) {
        run_cfg.phase_list.push_back((f.edge * edge_stagger) % f.period());
      }
    }
    sweep_point pt;
    pt.q = q;
    pt.radios = static_cast<int>(flows.size());
    pt.trace = run_simulation(topo, flows, scheduler, run_cfg);
    for (const auto& st : pt.trace.flows) pt.max_delay = std::max(pt.max_delay, st.max_delay);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace bbt
