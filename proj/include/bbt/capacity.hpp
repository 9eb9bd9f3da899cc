#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bbt/topology.hpp"
#include "bbt/traffic.hpp"

namespace bbt {

/// Discrete ADC widths a radio may use, strictly increasing, in bits.
struct quant_ladder {
  std::vector<int> levels;

  void validate() const;
  int min_level() const { return levels.front(); }
  int max_level() const { return levels.back(); }
  /// Index of a width in the ladder; throws when absent.
  std::size_t index_of(int bits) const;
};

/// One ADC width per radio, every entry a ladder member.
using quant_vector = std::vector<int>;

/// Average quantization noise power as a function of the ADC width. The
/// default is the uniform-quantizer model scale * 2^(-2Q), strictly
/// decreasing in Q; the scale only shifts absolute capacities, not
/// orderings.
struct quant_noise_model {
  std::function<double(int)> gamma;

  static quant_noise_model uniform(double scale = 2.721655269759087);  // pi*sqrt(3)/2
  double operator()(int bits) const { return gamma(bits); }
};

/// Frozen set of channel realizations shared by every capacity comparison
/// in one search (common random numbers). Entries are i.i.d. complex
/// Gaussian with unit variance per complex entry (Rayleigh fading),
/// generated from a counter-based stream so the ensemble depends only on
/// (seed, n, m, count).
struct channel_ensemble {
  int tx_antennas = 0;   // m
  int radios = 0;        // n
  double tx_power = 1.0;     // rho (linear)
  double noise_power = 1.0;  // sigma^2 (linear)
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXcd> realizations;  // each n x m

  static channel_ensemble generate(int radios, int tx_antennas, int count, double tx_power,
                                   double noise_power, std::uint64_t seed);
};

/// log2 det(I + rho * Sigma^-1 H H^H) for one realization, with
/// Sigma = sigma^2 I + diag(gamma(Q_i)). Computed on the Hermitian
/// congruence I + rho * Sigma^-1/2 H H^H Sigma^-1/2 via its Cholesky
/// factor so positivity stays explicit.
double capacity_one(const Eigen::MatrixXcd& h, const quant_vector& q, double tx_power,
                    double noise_power, const quant_noise_model& noise);

/// Ergodic capacity in b/s/Hz: mean of capacity_one over the ensemble,
/// accumulated as a pairwise tree sum over the fixed realization order.
double ergodic_capacity(const quant_vector& q, const channel_ensemble& ens,
                        const quant_noise_model& noise);

/// All vectors reachable by stepping exactly one coordinate down one ladder
/// level; coordinates already at the bottom are skipped.
std::vector<quant_vector> enum_next(const quant_vector& q, const quant_ladder& ladder);

/// Recomputes each radio's period from its quantization width, then runs
/// the end-to-end schedulability reduction. Flows must carry sampling
/// parameters (f); widths come from `q` by flow order.
bool schedulable_under_q(const quant_vector& q, const fat_tree_topology& topo,
                         std::span<const radio_flow> radios, edge_policy policy);

struct search_report {
  std::optional<quant_vector> best;  // nullopt when nothing is schedulable
  double capacity = 0.0;
  std::int64_t nodes_expanded = 0;   // unschedulable nodes whose children were pushed
  std::int64_t nodes_evaluated = 0;  // schedulable nodes whose capacity was computed
  double wall_ms = 0.0;
  /// Every capacity-evaluated vector with its value, in evaluation order.
  std::vector<std::pair<quant_vector, double>> evaluated;
};

/// Breadth-first search over the quantization lattice, starting from the
/// all-maximum vector. Schedulable nodes are capacity-evaluated and never
/// expanded; unschedulable nodes expand one step down per coordinate. A
/// visited set keeps duplicate enumerations (reachable through several
/// parents) out of the queue.
search_report bfs_search(const fat_tree_topology& topo, std::span<const radio_flow> radios,
                         const quant_ladder& ladder, const channel_ensemble& ens,
                         const quant_noise_model& noise, edge_policy policy);

/// Exhaustive reference search over all d^n vectors; refuses lattices above
/// `cap` nodes.
search_report brute_force_oracle(const fat_tree_topology& topo,
                                 std::span<const radio_flow> radios,
                                 const quant_ladder& ladder, const channel_ensemble& ens,
                                 const quant_noise_model& noise, edge_policy policy,
                                 std::int64_t cap = 100'000);

}  // namespace bbt
