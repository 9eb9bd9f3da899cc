#include "bbt/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace bbt {

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_flow_csv(std::ostream& os, const sim_trace& trace, const provenance& prov) {
  os << "# bbtrans-flows v1 scenario=" << hash_hex(prov.scenario_hash)
     << " seed=" << prov.seed << " version=" << kToolVersion << "\n";
  os << "flowId,rate_bps,maxDelay_ps,minDelay_ps,jitter_ps,misses,packets\n";
  for (const auto& f : trace.flows) {
    os << f.flow << "," << f.rate << "," << f.max_delay << "," << f.min_delay << ","
       << f.jitter << "," << f.missed << "," << f.delivered << "\n";
  }
}

void write_lattice_csv(std::ostream& os, const search_report& rep, const provenance& prov) {
  os << "# bbtrans-lattice v1 scenario=" << hash_hex(prov.scenario_hash)
     << " seed=" << prov.seed << " version=" << kToolVersion << "\n";
  os << "quantization,capacity_bps_hz\n";
  for (const auto& [q, cap] : rep.evaluated) {
    for (std::size_t i = 0; i < q.size(); ++i) os << (i ? ";" : "") << q[i];
    os << "," << std::setprecision(17) << cap << "\n";
  }
}

namespace {

nlohmann::json provenance_json(const provenance& prov) {
  return {{"scenario", hash_hex(prov.scenario_hash)},
          {"seed", prov.seed},
          {"version", kToolVersion}};
}

nlohmann::json verdict_json(const sched_verdict& v) {
  nlohmann::json j;
  j["schedulable"] = v.schedulable;
  j["overload"] = v.overload;
  switch (v.horizon) {
    case horizon_kind::busy_period: j["horizon"] = "busy-period"; break;
    case horizon_kind::hyperperiod: j["horizon"] = "hyperperiod"; break;
    case horizon_kind::none: j["horizon"] = "none"; break;
  }
  if (v.witness) {
    nlohmann::json w;
    if (v.witness->flow >= 0) {
      w["flow"] = v.witness->flow;
      w["job"] = v.witness->job;
    } else {
      w["t_ps"] = v.witness->instant;
    }
    j["witness"] = w;
  }
  return j;
}

}  // namespace

std::string simulation_summary_json(const scenario& s, const sim_trace& trace,
                                    const provenance& prov) {
  nlohmann::json j;
  j["provenance"] = provenance_json(prov);
  j["horizon_ps"] = s.horizon;
  j["scheduler"] = policy_name(s.scheduler);
  j["agg_bound_ps"] = aggregation_delay_bound(s.topology);
  j["generated"] = trace.generated;
  j["delivered"] = trace.delivered;
  j["in_flight"] = trace.in_flight;
  time_ps max_delay = 0;
  time_ps max_post_edge = 0;
  std::int64_t missed = 0;
  nlohmann::json flows = nlohmann::json::array();
  for (const auto& f : trace.flows) {
    max_delay = std::max(max_delay, f.max_delay);
    max_post_edge = std::max(max_post_edge, f.max_post_edge);
    missed += f.missed;
    flows.push_back({{"flow", f.flow},
                     {"rate_bps", f.rate},
                     {"max_delay_ps", f.max_delay},
                     {"min_delay_ps", f.min_delay},
                     {"jitter_ps", f.jitter},
                     {"misses", f.missed},
                     {"packets", f.delivered}});
  }
  j["max_delay_ps"] = max_delay;
  j["max_post_edge_delay_ps"] = max_post_edge;
  j["deadline_misses"] = missed;
  j["max_queuing_by_level_ps"] = trace.max_queuing_by_level;
  j["flows"] = flows;
  if (!trace.warnings.empty()) j["warnings"] = trace.warnings;
  return j.dump(2);
}

std::string analyze_report_json(const scenario& s,
                                const std::vector<topology_violation>& violations,
                                const e2e_result& result, const provenance& prov) {
  nlohmann::json j;
  j["provenance"] = provenance_json(prov);
  j["scheduler"] = policy_name(s.scheduler);
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& v : violations) {
    viol.push_back({{"requirement", v.requirement}, {"detail", v.detail}});
  }
  j["violations"] = viol;
  j["agg_bound_ps"] = result.budget.agg_bound;
  j["edge_budget_ps"] = result.budget.edge_budget;
  nlohmann::json deadlines = nlohmann::json::array();
  for (const auto& [id, d] : result.budget.edge_deadlines) {
    deadlines.push_back({{"flow", id}, {"local_deadline_ps", d}});
  }
  j["local_deadlines"] = deadlines;
  j["infeasible_flows"] = result.infeasible_flows;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : result.per_edge) {
    nlohmann::json je = verdict_json(e.verdict);
    je["edge"] = e.edge;
    je["flows"] = e.flow_ids;
    edges.push_back(je);
  }
  j["per_edge"] = edges;
  j["schedulable"] = result.schedulable();
  return j.dump(2);
}

std::string search_report_json(const scenario& s, const search_report& rep,
                               const std::string& oracle_line, const provenance& prov) {
  nlohmann::json j;
  j["provenance"] = provenance_json(prov);
  if (s.optimization) {
    j["ladder"] = s.optimization->ladder.levels;
    j["scheduler"] = policy_name(s.optimization->policy);
    j["realizations"] = s.optimization->realizations;
  }
  if (rep.best) {
    j["quantization"] = *rep.best;
  } else {
    j["quantization"] = nullptr;
  }
  j["capacity_bps_hz"] = rep.capacity;
  j["nodes_expanded"] = rep.nodes_expanded;
  j["nodes_evaluated"] = rep.nodes_evaluated;
  j["wall_ms"] = rep.wall_ms;
  if (!oracle_line.empty()) j["oracle"] = oracle_line;
  return j.dump(2);
}

}  // namespace bbt
