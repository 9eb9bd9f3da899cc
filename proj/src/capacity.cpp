#include "bbt/capacity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "bbt/rng.hpp"

namespace bbt {

void quant_ladder::validate() const {
  if (levels.empty()) throw std::invalid_argument("quantization ladder must be non-empty");
  if (levels.front() < 1) throw std::invalid_argument("quantization widths must be >= 1 bit");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) {
      throw std::invalid_argument("quantization ladder must be strictly increasing");
    }
  }
}

std::size_t quant_ladder::index_of(int bits) const {
  const auto it = std::lower_bound(levels.begin(), levels.end(), bits);
  if (it == levels.end() || *it != bits) {
    throw std::invalid_argument("quantization width is not a ladder level");
  }
  return static_cast<std::size_t>(it - levels.begin());
}

quant_noise_model quant_noise_model::uniform(double scale) {
  quant_noise_model m;
  m.gamma = [scale](int bits) { return scale * std::exp2(-2.0 * bits); };
  return m;
}

channel_ensemble channel_ensemble::generate(int radios, int tx_antennas, int count,
                                            double tx_power, double noise_power,
                                            std::uint64_t seed) {
  if (radios < 1 || tx_antennas < 1 || count < 1) {
    throw std::invalid_argument("ensemble dimensions must be positive");
  }
  if (noise_power <= 0.0) throw std::invalid_argument("thermal noise power must be positive");
  channel_ensemble ens;
  ens.radios = radios;
  ens.tx_antennas = tx_antennas;
  ens.tx_power = tx_power;
  ens.noise_power = noise_power;
  ens.seed = seed;
  ens.realizations.reserve(static_cast<std::size_t>(count));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < count; ++r) {
    Eigen::MatrixXcd h(radios, tx_antennas);
    for (int i = 0; i < radios; ++i) {
      for (int j = 0; j < tx_antennas; ++j) {
        const std::uint64_t counter =
            (static_cast<std::uint64_t>(r) << 32) ^
            (static_cast<std::uint64_t>(i) << 16) ^ static_cast<std::uint64_t>(j);
        const double u1 = unit_open_closed(keyed_u64(seed, counter * 2));
        const double u2 = unit_open_closed(keyed_u64(seed, counter * 2 + 1));
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        h(i, j) = std::complex<double>(mag * std::cos(ang), mag * std::sin(ang)) * inv_sqrt2;
      }
    }
    ens.realizations.push_back(std::move(h));
  }
  return ens;
}

double capacity_one(const Eigen::MatrixXcd& h, const quant_vector& q, double tx_power,
                    double noise_power, const quant_noise_model& noise) {
  const auto n = h.rows();
  if (static_cast<Eigen::Index>(q.size()) != n) {
    throw std::invalid_argument("quantization vector length must equal the radio count");
  }
  // scale row i of H by 1/sqrt(sigma^2 + gamma(Q_i))
  Eigen::MatrixXcd g = h;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = noise_power + noise(q[static_cast<std::size_t>(i)]);
    if (!(s > 0.0)) throw std::invalid_argument("noise covariance must stay positive");
    g.row(i) *= 1.0 / std::sqrt(s);
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
  a.noalias() += tx_power * g * g.adjoint();
  const Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("capacity matrix is not positive definite");
  }
  double log_det = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) log_det += std::log2(l(i, i).real());
  const double cap = 2.0 * log_det;
  if (!std::isfinite(cap)) throw std::runtime_error("capacity evaluated to a non-finite value");
  return cap;
}

namespace {

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

double ergodic_capacity(const quant_vector& q, const channel_ensemble& ens,
                        const quant_noise_model& noise) {
  if (ens.realizations.empty()) throw std::invalid_argument("channel ensemble is empty");
  std::vector<double> caps;
  caps.reserve(ens.realizations.size());
  for (const auto& h : ens.realizations) {
    caps.push_back(capacity_one(h, q, ens.tx_power, ens.noise_power, noise));
  }
  return pairwise_sum(caps, 0, caps.size()) / static_cast<double>(caps.size());
}

std::vector<quant_vector> enum_next(const quant_vector& q, const quant_ladder& ladder) {
  ladder.validate();
  std::vector<quant_vector> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::size_t idx = ladder.index_of(q[i]);
    if (idx == 0) continue;  // already at the bottom of the lattice
    quant_vector next = q;
    next[i] = ladder.levels[idx - 1];
    out.push_back(std::move(next));
  }
  return out;
}

bool schedulable_under_q(const quant_vector& q, const fat_tree_topology& topo,
                         std::span<const radio_flow> radios, edge_policy policy) {
  if (q.size() != radios.size()) {
    throw std::invalid_argument("quantization vector length must equal the radio count");
  }
  std::vector<radio_flow> adjusted(radios.begin(), radios.end());
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    if (!adjusted[i].has_sampling_params()) {
      throw std::invalid_argument("flows need sampling parameters (f) to re-quantize");
    }
    adjusted[i].quant_bits = q[i];
    adjusted[i].rate = flow_rate(q[i], adjusted[i].sample_hz);
  }
  return e2e_schedulable(topo, adjusted, policy).schedulable();
}

namespace {

struct search_clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

}  // namespace

search_report bfs_search(const fat_tree_topology& topo, std::span<const radio_flow> radios,
                         const quant_ladder& ladder, const channel_ensemble& ens,
                         const quant_noise_model& noise, edge_policy policy) {
  ladder.validate();
  if (radios.empty()) throw std::invalid_argument("at least one radio is required");
  search_clock clock;
  search_report rep;

  std::deque<quant_vector> frontier;
  std::set<quant_vector> visited;
  const quant_vector root(radios.size(), ladder.max_level());
  frontier.push_back(root);
  visited.insert(root);

  while (!frontier.empty()) {
    const quant_vector q = frontier.front();
    frontier.pop_front();
    if (schedulable_under_q(q, topo, radios, policy)) {
      ++rep.nodes_evaluated;
      const double cap = ergodic_capacity(q, ens, noise);
      rep.evaluated.emplace_back(q, cap);
      if (!rep.best || cap > rep.capacity) {
        rep.capacity = cap;
        rep.best = q;
      }
    } else {
      ++rep.nodes_expanded;
      for (auto& next : enum_next(q, ladder)) {
        if (visited.insert(next).second) frontier.push_back(std::move(next));
      }
    }
  }
  if (!rep.best) rep.capacity = 0.0;
  rep.wall_ms = clock.ms();
  return rep;
}

search_report brute_force_oracle(const fat_tree_topology& topo,
                                 std::span<const radio_flow> radios,
                                 const quant_ladder& ladder, const channel_ensemble& ens,
                                 const quant_noise_model& noise, edge_policy policy,
                                 std::int64_t cap) {
  ladder.validate();
  if (radios.empty()) throw std::invalid_argument("at least one radio is required");
  const std::size_t n = radios.size();
  const std::size_t d = ladder.levels.size();
  double lattice = 1.0;
  for (std::size_t i = 0; i < n; ++i) lattice *= static_cast<double>(d);
  if (lattice > static_cast<double>(cap)) {
    throw std::invalid_argument("lattice too large for the brute-force oracle");
  }

  search_clock clock;
  search_report rep;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    quant_vector q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = ladder.levels[idx[i]];
    if (schedulable_under_q(q, topo, radios, policy)) {
      ++rep.nodes_evaluated;
      const double c = ergodic_capacity(q, ens, noise);
      rep.evaluated.emplace_back(q, c);
      if (!rep.best || c > rep.capacity) {
        rep.capacity = c;
        rep.best = q;
      }
    } else {
      ++rep.nodes_expanded;
    }
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == d) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  if (!rep.best) rep.capacity = 0.0;
  rep.wall_ms = clock.ms();
  return rep;
}

}  // namespace bbt
