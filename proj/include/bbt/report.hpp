#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "bbt/capacity.hpp"
#include "bbt/scenario.hpp"
#include "bbt/sim.hpp"
#include "bbt/topology.hpp"

namespace bbt {

inline constexpr const char* kToolVersion = "0.1.0";

struct provenance {
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
};

/// Per-flow CSV, schema v1:
///   flowId,rate_bps,maxDelay_ps,minDelay_ps,jitter_ps,misses,packets
/// The header comment line carries the schema version, scenario hash, seed
/// and tool version; the body is byte-stable for identical inputs.
void write_flow_csv(std::ostream& os, const sim_trace& trace, const provenance& prov);

/// Evaluated quantization lattice, schema v1: q_1..q_n,capacity_bps_hz.
void write_lattice_csv(std::ostream& os, const search_report& rep, const provenance& prov);

/// Machine-readable run summary: analytical bound next to observed maxima.
std::string simulation_summary_json(const scenario& s, const sim_trace& trace,
                                    const provenance& prov);

/// Analysis report: validation results, budget, per-flow local deadlines,
/// per-edge verdicts with witnesses.
std::string analyze_report_json(const scenario& s,
                                const std::vector<topology_violation>& violations,
                                const e2e_result& result, const provenance& prov);

std::string search_report_json(const scenario& s, const search_report& rep,
                               const std::string& oracle_line, const provenance& prov);

std::string hash_hex(std::uint64_t h);

}  // namespace bbt
