#pragma once

// Deterministic random-instance generators shared by the property tests and
// the acceptance suite. Everything derives from the splitmix stream so runs
// are identical across builds.

#include <cstdint>
#include <vector>

#include "bbt/capacity.hpp"
#include "bbt/rng.hpp"
#include "bbt/sched.hpp"
#include "bbt/sim.hpp"
#include "bbt/topology.hpp"
#include "bbt/traffic.hpp"

namespace testsup {

struct test_rng {
  std::uint64_t state;
  explicit test_rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() { return bbt::splitmix64(state); }
  std::int64_t below(std::int64_t bound) {
    return static_cast<std::int64_t>(bbt::bounded_u64(next(), static_cast<std::uint64_t>(bound)));
  }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + below(hi - lo + 1);
  }
  template <typename T>
  T pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(below(static_cast<std::int64_t>(v.size())))];
  }
  double unit() { return bbt::unit_open_closed(next()); }
};

// Small integer-grid flow sets for the single-link oracle comparison.
// Periods and deadlines in whole microseconds, arbitrary deadline model
// (d may exceed or undercut T), possibly overloaded.
inline bbt::flow_set random_flow_set(test_rng& rng) {
  const std::vector<bbt::time_ps> periods = {2, 3, 4, 5, 6, 8, 10, 12};
  const std::vector<bbt::time_ps> txs = {500'000, 800'000, 1'000'000, 2'000'000};
  bbt::flow_set fs;
  const int n = static_cast<int>(rng.range(1, 5));
  const bbt::time_ps c = rng.pick(txs);
  for (int i = 0; i < n; ++i) {
    const bbt::time_ps t = rng.pick(periods) * bbt::kPsPerUs;
    const bbt::time_ps d = rng.range(1, 16) * bbt::kPsPerUs;
    fs.flows.push_back({t, d, c});
  }
  return fs;
}

// Transmission times that divide B * 1e12 for an 8000-bit packet, so link
// capacities and hop times stay exact integers end to end.
inline const std::vector<bbt::time_ps>& exact_tx_grid() {
  static const std::vector<bbt::time_ps> grid = {
      8'000,   10'000,  16'000,  20'000,  25'000,    32'000,    40'000,
      50'000,  80'000,  100'000, 125'000, 160'000,   200'000,   250'000,
      320'000, 400'000, 500'000, 625'000, 800'000,   1'000'000, 1'250'000,
      1'600'000, 2'000'000, 2'500'000, 3'200'000, 4'000'000};
  return grid;
}

constexpr std::int64_t kGenPacketBits = 8'000;

inline bbt::bits_per_sec cap_for_tx(bbt::time_ps tx) {
  return static_cast<bbt::bits_per_sec>(kGenPacketBits * bbt::kPsPerSec / tx);
}

struct random_network {
  bbt::fat_tree_topology topology;
  std::vector<bbt::radio_flow> flows;
};

// Random validated fat tree with per-edge flow mixes. Periods are drawn
// from a grid that keeps rates exact; deadlines default to `deadline_scale`
// periods.
inline random_network random_fat_tree(test_rng& rng, int deadline_scale = 2) {
  random_network net;
  auto& t = net.topology;
  t.arity = static_cast<int>(rng.range(2, 4));
  t.height = static_cast<int>(rng.range(1, 3));
  t.packet_bits = kGenPacketBits;
  t.switch_delay = rng.pick<bbt::time_ps>({0, 10'000, 50'000, 100'000});
  t.prop_delay = rng.pick<bbt::time_ps>({0, 10'000, 50'000});

  // fat link ladder: each level's tx time at most 1/q of the previous
  const auto& grid = exact_tx_grid();
  bbt::time_ps tx = rng.pick<bbt::time_ps>({800'000, 1'000'000, 1'600'000, 2'000'000});
  t.link_caps.push_back(cap_for_tx(tx));
  for (int j = 1; j <= t.height; ++j) {
    bbt::time_ps best = 0;
    for (const auto g : grid) {
      if (g * t.arity <= tx && g > best) best = g;
    }
    if (best == 0) best = grid.front();
    tx = best;
    t.link_caps.push_back(cap_for_tx(tx));
  }

  const int edges = t.num_edges();
  t.edge_radios.assign(static_cast<std::size_t>(edges), {});
  const std::vector<bbt::time_ps> period_grid = {4'000'000,  5'000'000,  8'000'000,
                                                 10'000'000, 16'000'000, 20'000'000,
                                                 25'000'000, 40'000'000};
  int id = 0;
  for (int e = 0; e < edges; ++e) {
    const int k = static_cast<int>(rng.range(1, 4));
    for (int i = 0; i < k; ++i) {
      const bbt::time_ps period = rng.pick(period_grid);
      bbt::radio_flow f;
      f.id = id++;
      f.edge = e;
      f.payload_bits = kGenPacketBits;
      f.rate = static_cast<bbt::bits_per_sec>(kGenPacketBits * bbt::kPsPerSec / period);
      f.deadline = period * deadline_scale;
      net.flows.push_back(f);
      t.edge_radios[static_cast<std::size_t>(e)].push_back(f.id);
    }
  }
  return net;
}

// Radios carrying sampling parameters for the quantization search; rates
// derive from (f, Q) so schedulable_under_q can re-quantize them.
inline random_network random_quantized_network(test_rng& rng, const bbt::quant_ladder& ladder,
                                               int n_radios) {
  random_network net;
  auto& t = net.topology;
  t.arity = 2;
  t.height = 1;
  t.packet_bits = kGenPacketBits;
  t.switch_delay = 10'000;
  t.prop_delay = 1'000;
  // edge uplinks slow enough that the top of the ladder tends to
  // oversubscribe an edge while the bottom stays feasible
  const bbt::time_ps tx = rng.pick<bbt::time_ps>({4'000'000, 8'000'000});
  t.link_caps = {cap_for_tx(tx), cap_for_tx(tx / 2)};
  t.edge_radios.assign(2, {});
  const std::vector<std::int64_t> freqs = {20'000'000, 25'000'000, 40'000'000, 50'000'000};
  for (int i = 0; i < n_radios; ++i) {
    const int edge = static_cast<int>(rng.below(2));
    bbt::radio_flow f = bbt::make_radio_flow(i, rng.pick(freqs), ladder.max_level(),
                                             kGenPacketBits, 1, edge);
    f.deadline = rng.range(40, 400) * bbt::kPsPerUs;
    net.flows.push_back(f);
    t.edge_radios[static_cast<std::size_t>(edge)].push_back(i);
  }
  return net;
}

inline bbt::quant_vector random_vector_from(test_rng& rng, const bbt::quant_ladder& ladder,
                                            std::size_t n) {
  bbt::quant_vector q(n);
  for (auto& v : q) v = rng.pick(ladder.levels);
  return q;
}

// A coordinate-wise lower neighbour of q (possibly q itself).
inline bbt::quant_vector random_below(test_rng& rng, const bbt::quant_ladder& ladder,
                                      const bbt::quant_vector& q) {
  bbt::quant_vector out = q;
  for (auto& v : out) {
    const std::size_t idx = ladder.index_of(v);
    v = ladder.levels[static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(idx) + 1))];
  }
  return out;
}

}  // namespace testsup
