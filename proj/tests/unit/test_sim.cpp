#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <map>

#include "bbt/sim.hpp"

#include "../support/generators.hpp"
#include "../support/single_link_sim.hpp"

using namespace bbt;

namespace {

constexpr time_ps us = kPsPerUs;

// one edge switch feeding one aggregation switch, both 10G, 1250-byte
// packets: the shared transmission time is exactly 1us
fat_tree_topology fifo_chain() {
  fat_tree_topology t;
  t.arity = 1;
  t.height = 1;
  t.link_caps = {10'000'000'000, 10'000'000'000};
  t.switch_delay = 0;
  t.prop_delay = 0;
  t.packet_bits = 10'000;
  t.edge_radios = {{0, 1}};
  return t;
}

fat_tree_topology table_topology(int q = 3) {
  fat_tree_topology t;
  t.arity = q;
  t.height = 2;
  t.link_caps = {10'000'000'000, 40'000'000'000, 200'000'000'000};
  t.switch_delay = 50'000;
  t.prop_delay = 10'000;
  t.packet_bits = 8'000;
  t.edge_radios.assign(static_cast<std::size_t>(t.num_edges()), {});
  return t;
}

std::vector<radio_flow> four_rate_mix(fat_tree_topology& t, time_ps deadline_is_period = 1) {
  const std::vector<bits_per_sec> rates = {1'000'000'000, 1'500'000'000, 2'000'000'000,
                                           2'500'000'000};
  std::vector<radio_flow> flows;
  int id = 0;
  for (int e = 0; e < t.num_edges(); ++e) {
    for (const auto r : rates) {
      radio_flow f = make_rate_flow(id++, r, t.packet_bits, 1, e);
      f.deadline = f.period() * deadline_is_period;
      flows.push_back(f);
      t.edge_radios[static_cast<std::size_t>(e)].push_back(f.id);
    }
  }
  return flows;
}

}  // namespace

TEST_CASE("FIFO output of two periodic flows alternates 2us and 4us gaps") {
  const auto t = fifo_chain();
  const std::vector<radio_flow> flows = {
      make_rate_flow(0, 5'000'000'000, 10'000, kPsPerMs, 0),  // T = 2us
      make_rate_flow(1, 3'333'333'333, 10'000, kPsPerMs, 0),  // T = 3us
  };
  REQUIRE(flows[0].period() == 2 * us);
  REQUIRE(flows[1].period() == 3 * us);

  sim_config cfg;
  cfg.horizon = 40 * us;
  cfg.record_packets = true;
  const auto trace = run_simulation(t, flows, edge_policy::fifo, cfg);

  std::vector<time_ps> departures;
  for (const auto& p : trace.packets) {
    if (p.flow == 1) departures.push_back(p.dep_edge);
  }
  std::sort(departures.begin(), departures.end());
  REQUIRE(departures.size() >= 5);
  CHECK(departures[0] == 2 * us);
  // gaps run 2us, 4us, 2us, 4us, ...
  for (std::size_t i = 1; i < departures.size(); ++i) {
    const time_ps gap = departures[i] - departures[i - 1];
    CHECK(gap == ((i % 2 == 1) ? 2 * us : 4 * us));
  }
}

TEST_CASE("an uncontended packet sees exactly the sum of hop delays") {
  auto t = table_topology();
  radio_flow f = make_rate_flow(0, 1'000'000'000, t.packet_bits, kPsPerMs, 2);
  t.edge_radios[2].push_back(0);
  const std::vector<radio_flow> flows = {f};

  sim_config cfg;
  cfg.horizon = 100 * us;
  const auto trace = run_simulation(t, flows, edge_policy::np_edf, cfg);

  time_ps expected = 0;
  for (int level = 1; level <= t.height + 1; ++level) {
    expected += t.switch_delay + t.tx_time(level) + t.prop_delay;
  }
  REQUIRE(trace.flows.size() == 1);
  CHECK(trace.flows[0].max_delay == expected);
  CHECK(trace.flows[0].min_delay == expected);
  CHECK(trace.flows[0].jitter == 0);
  CHECK(trace.flows[0].missed == 0);
}

TEST_CASE("prioritized edges meet the reference deadlines where FIFO misses") {
  auto t = table_topology();
  const auto flows = four_rate_mix(t);

  sim_config cfg;
  cfg.horizon = 2 * kPsPerMs;

  const auto rm = run_simulation(t, flows, edge_policy::np_fixed_priority, cfg);
  for (const auto& st : rm.flows) {
    CHECK(st.missed == 0);
  }

  const auto fifo = run_simulation(t, flows, edge_policy::fifo, cfg);
  for (const auto& st : fifo.flows) {
    if (st.rate == 2'500'000'000) {
      CHECK(st.max_delay > 3'200'000);
    }
  }
}

TEST_CASE("traces are conserved and deterministic") {
  auto t = table_topology();
  const auto flows = four_rate_mix(t);
  sim_config cfg;
  cfg.horizon = kPsPerMs;
  cfg.phases = phase_mode::seeded_random;
  cfg.seed = 77;
  const auto a = run_simulation(t, flows, edge_policy::np_fixed_priority, cfg);
  CHECK(a.generated == a.delivered + a.in_flight);
  std::int64_t per_flow = 0;
  for (const auto& st : a.flows) per_flow += st.generated;
  CHECK(per_flow == a.generated);
  const auto b = run_simulation(t, flows, edge_policy::np_fixed_priority, cfg);
  CHECK(a == b);
}

TEST_CASE("observed aggregation queuing stays under the per-hop bound") {
  testsup::test_rng rng(0xBEEFull);
  for (int trial = 0; trial < 10; ++trial) {
    auto net = testsup::random_fat_tree(rng);
    sim_config cfg;
    cfg.horizon = kPsPerMs;
    cfg.phases = phase_mode::seeded_random;
    cfg.seed = rng.next();
    const auto trace = run_simulation(net.topology, net.flows, edge_policy::np_edf, cfg);
    for (int level = 1; level <= net.topology.height; ++level) {
      CHECK(trace.max_queuing_by_level[static_cast<std::size_t>(level)] <=
            max_queuing_per_hop(net.topology, level));
    }
  }
}

TEST_CASE("FIFO never repeats an ingress while an earlier arrival waits") {
  // single aggregation switch so every root-hop instant can be
  // reconstructed from the packet records
  fat_tree_topology t;
  t.arity = 3;
  t.height = 1;
  t.link_caps = {10'000'000'000, 40'000'000'000};
  t.switch_delay = 50'000;
  t.prop_delay = 10'000;
  t.packet_bits = 8'000;
  t.edge_radios.assign(3, {});
  const auto flows = four_rate_mix(t);

  sim_config cfg;
  cfg.horizon = kPsPerMs;
  cfg.phases = phase_mode::seeded_random;
  cfg.seed = 3;
  cfg.record_packets = true;
  const auto trace = run_simulation(t, flows, edge_policy::np_fixed_priority, cfg);

  struct root_tx {
    time_ps enq;    // entry into the root egress queue
    time_ps start;  // service start on the destination link
    int port;       // ingress = edge index
  };
  const time_ps c2 = t.tx_time(2);
  std::vector<root_tx> txs;
  for (const auto& p : trace.packets) {
    txs.push_back({p.arr_agg + t.switch_delay, p.delivered - t.prop_delay - c2, p.flow / 4});
  }
  std::sort(txs.begin(), txs.end(),
            [](const root_tx& a, const root_tx& b) { return a.start < b.start; });
  REQUIRE(txs.size() > 100);
  // a second packet from one ingress is only served after every packet
  // from the other ingresses that was already queued when the first one
  // went out
  std::map<int, time_ps> prev_start;
  std::size_t violations = 0;
  for (const auto& tx : txs) {
    const auto it = prev_start.find(tx.port);
    if (it != prev_start.end()) {
      for (const auto& other : txs) {
        if (other.port != tx.port && other.enq <= it->second && other.start > tx.start) {
          ++violations;
        }
      }
    }
    prev_start[tx.port] = tx.start;
  }
  CHECK(violations == 0);
}

TEST_CASE("background sources block but never break the widened bound") {
  auto t = table_topology();
  background_spec bg;
  bg.packet_bits = 12'000;
  bg.where = background_spec::attach::everywhere;
  t.background = bg;
  const auto flows = four_rate_mix(t);

  sim_config cfg;
  cfg.horizon = kPsPerMs;
  const auto trace = run_simulation(t, flows, edge_policy::np_fixed_priority, cfg);
  for (int level = 1; level <= t.height; ++level) {
    CHECK(trace.max_queuing_by_level[static_cast<std::size_t>(level)] <=
          max_queuing_per_hop(t, level));
  }
  // every packet's post-edge delay stays under the background-aware bound
  const time_ps bound = aggregation_delay_bound(t);
  for (const auto& st : trace.flows) CHECK(st.max_post_edge <= bound);
}

TEST_CASE("saturated links trip the queue cap") {
  auto t = fifo_chain();
  // two 8 Gb/s flows through a 10 Gb/s uplink
  const std::vector<radio_flow> flows = {
      make_rate_flow(0, 8'000'000'000, 10'000, kPsPerMs, 0),
      make_rate_flow(1, 8'000'000'000, 10'000, kPsPerMs, 0),
  };
  sim_config cfg;
  cfg.horizon = 10 * kPsPerMs;
  cfg.queue_cap = 64;
  CHECK_THROWS_AS(run_simulation(t, flows, edge_policy::fifo, cfg), sim_overload_error);
}

TEST_CASE("short horizons warn instead of failing") {
  auto t = fifo_chain();
  const std::vector<radio_flow> flows = {
      make_rate_flow(0, 1'000'000, 10'000, kPsPerMs, 0),  // 10 ms period
  };
  sim_config cfg;
  cfg.horizon = 5 * us;
  const auto trace = run_simulation(t, flows, edge_policy::fifo, cfg);
  CHECK(!trace.warnings.empty());
}

TEST_CASE("scaling sweep instantiates 4 q^2 radios") {
  auto base = table_topology();
  std::vector<radio_flow> mix;
  const std::vector<bits_per_sec> rates = {1'000'000'000, 1'500'000'000, 2'000'000'000,
                                           2'500'000'000};
  int id = 0;
  for (const auto r : rates) {
    radio_flow f = make_rate_flow(id++, r, base.packet_bits, 1, 0);
    f.deadline = f.period();
    mix.push_back(f);
  }
  const std::vector<int> qs = {1, 2, 3, 4};
  sim_config cfg;
  cfg.horizon = 200 * us;
  const auto points = sweep_scale(base, qs, mix, edge_policy::np_fixed_priority, cfg);
  REQUIRE(points.size() == 4);
  CHECK(points[0].radios == 4);
  CHECK(points[1].radios == 16);
  CHECK(points[2].radios == 36);
  CHECK(points[3].radios == 64);
  for (const auto& pt : points) CHECK(pt.max_delay > 0);
}

TEST_CASE("edge scheduling agrees with the reference link simulation") {
  // Degenerate chain with zero switching and propagation delay: the edge
  // queue behaves exactly like a bare link, so per-packet edge departures
  // must match the independent job-level simulation packet for packet.
  testsup::test_rng rng(0xD1FFull);
  const std::vector<time_ps> tx_grid = {500'000, 800'000, 1'000'000, 2'000'000};
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto fs = testsup::random_flow_set(rng);
    // keep the link underloaded so the production run stays within its cap
    while (!fs.flows.empty() &&
           edf_test(fs, false).overload) {
      fs.flows.pop_back();
    }
    if (fs.flows.empty()) continue;
    const time_ps c = fs.flows.front().tx_time;

    // a nonzero switching delay lands simultaneous releases in the queue
    // before the scheduler picks, mirroring the reference simulation's
    // synchronous admission; it shifts every departure by the same constant
    fat_tree_topology t;
    t.arity = 1;
    t.height = 1;
    t.packet_bits = 8'000;
    t.switch_delay = 50'000;
    t.prop_delay = 0;
    const bits_per_sec cap = static_cast<bits_per_sec>(8'000 * kPsPerSec / c);
    t.link_caps = {cap, cap};
    REQUIRE(t.tx_time(1) == c);
    t.edge_radios = {{}};

    std::vector<radio_flow> flows;
    for (std::size_t i = 0; i < fs.flows.size(); ++i) {
      radio_flow f = make_rate_flow(
          static_cast<int>(i),
          static_cast<bits_per_sec>(8'000 * kPsPerSec / fs.flows[i].period), 8'000,
          fs.flows[i].deadline, 0);
      REQUIRE(f.period() == fs.flows[i].period);
      flows.push_back(f);
      t.edge_radios[0].push_back(f.id);
    }

    const time_ps span = testsup::link_sim_span(fs);
    for (const bool edf : {true, false}) {
      // production fixed-priority classes are rate-monotonic, so feed the
      // oracle the same order
      flow_set oracle_fs = edf ? fs : rate_monotonic_order(fs);
      std::vector<int> oracle_ids(flows.size());
      {
        std::vector<std::size_t> order(fs.flows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (!edf) {
          std::stable_sort(order.begin(), order.end(), [&fs](std::size_t a, std::size_t b) {
            return fs.flows[a].period < fs.flows[b].period;
          });
        }
        for (std::size_t r = 0; r < order.size(); ++r) {
          oracle_ids[r] = static_cast<int>(order[r]);
        }
      }
      const auto ref = testsup::simulate_link(
          oracle_fs, edf ? testsup::link_policy::edf : testsup::link_policy::fixed_priority,
          false, span);

      sim_config cfg;
      cfg.horizon = span;
      cfg.record_packets = true;
      cfg.queue_cap = 200'000;
      const auto trace = run_simulation(
          t, flows, edf ? edge_policy::np_edf : edge_policy::np_fixed_priority, cfg);

      std::map<std::pair<int, std::int64_t>, time_ps> edge_departures;
      for (const auto& p : trace.packets) edge_departures[{p.flow, p.seq}] = p.dep_edge;
      for (const auto& jc : ref.completions) {
        const int flow_id = oracle_ids[static_cast<std::size_t>(jc.flow)];
        const auto it = edge_departures.find({flow_id, jc.seq});
        if (it != edge_departures.end()) {
          CHECK(it->second - t.switch_delay == jc.completion);
          ++compared;
        }
      }
    }
  }
  CHECK(compared > 1500);
}

TEST_CASE("background-aware verdicts stay sound in simulation") {
  auto t = table_topology();
  background_spec bg;
  bg.packet_bits = 12'000;
  bg.where = background_spec::attach::everywhere;
  t.background = bg;
  // twice the period as the bound leaves room for the blocking terms
  auto flows = four_rate_mix(t, 2);

  const auto res = e2e_schedulable(t, flows, edge_policy::np_fixed_priority);
  REQUIRE(res.schedulable());
  for (const int rep : {0, 1, 2}) {
    sim_config cfg;
    cfg.horizon = kPsPerMs;
    cfg.phases = rep == 0 ? phase_mode::synchronous : phase_mode::seeded_random;
    cfg.seed = static_cast<std::uint64_t>(rep);
    const auto trace = run_simulation(t, flows, edge_policy::np_fixed_priority, cfg);
    for (const auto& st : trace.flows) CHECK(st.missed == 0);
  }
}
