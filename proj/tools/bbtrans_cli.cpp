// Command-line front end: scenario-driven analysis, simulation and
// quantization search for real-time baseband transport over fat trees.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bbt/report.hpp"
#include "bbt/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitParse = 2;
constexpr int kExitRuntime = 3;

struct common_opts {
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> horizon_override;
};

bbt::scenario load(const common_opts& opts) {
  bbt::scenario s = bbt::load_scenario(opts.scenario_path);
  if (opts.seed_override) s.seed = *opts.seed_override;
  if (opts.horizon_override) s.horizon = bbt::parse_time(*opts.horizon_override);
  return s;
}

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + name + " under " + dir);
  out << body;
}

int cmd_validate(const common_opts& opts) {
  const bbt::scenario s = load(opts);
  const auto violations = bbt::validate_topology(s.topology, s.flows);
  std::cout << "scenario : " << bbt::hash_hex(bbt::scenario_hash(s)) << "\n";
  std::cout << "topology : q=" << s.topology.arity << " h=" << s.topology.height
            << " edges=" << s.topology.num_edges() << " radios=" << s.flows.size() << "\n";
  if (violations.empty()) {
    std::cout << "validation: OK (fat-tree, symmetric, non-preemptive, equal packet sizes)\n";
    return kExitOk;
  }
  for (const auto& v : violations) {
    std::cout << "violation [" << v.requirement << "]: " << v.detail << "\n";
  }
  return kExitInfeasible;
}

int cmd_analyze(const common_opts& opts) {
  const bbt::scenario s = load(opts);
  const bbt::provenance prov{bbt::scenario_hash(s), s.seed};
  const auto violations = bbt::validate_topology(s.topology, s.flows);
  if (!violations.empty()) {
    for (const auto& v : violations) {
      std::cout << "violation [" << v.requirement << "]: " << v.detail << "\n";
    }
    return kExitInfeasible;
  }
  if (s.scheduler == bbt::edge_policy::fifo) {
    std::cerr << "analyze: no local schedulability test exists for FIFO edges; "
                 "set simulation.scheduler to edf or rate-monotonic\n";
    return kExitParse;
  }
  const auto result = bbt::e2e_schedulable(s.topology, s.flows, s.scheduler);

  std::cout << "scenario   : " << bbt::hash_hex(prov.scenario_hash) << "\n";
  std::cout << "agg bound  : " << bbt::format_ps(result.budget.agg_bound) << "\n";
  std::cout << "edge budget: " << bbt::format_ps(result.budget.edge_budget) << "\n";
  for (const auto& f : s.flows) {
    std::cout << "flow " << f.id << ": rate=" << f.rate << "bps T=" << f.period()
              << "ps D=" << f.deadline
              << "ps d'=" << result.budget.edge_deadlines.at(f.id) << "ps\n";
  }
  if (!result.infeasible_flows.empty()) {
    std::cout << "infeasible flows (aggregation budget exceeds the deadline):";
    for (const int id : result.infeasible_flows) std::cout << " " << id;
    std::cout << "\n";
  }
  for (const auto& e : result.per_edge) {
    std::cout << "edge " << e.edge << ": "
              << (e.verdict.schedulable ? "schedulable" : "UNSCHEDULABLE");
    if (e.verdict.witness) {
      if (e.verdict.witness->flow >= 0) {
        std::cout << " (witness: flow " << e.verdict.witness->flow << ", job "
                  << e.verdict.witness->job << ")";
      } else {
        std::cout << " (witness: t=" << e.verdict.witness->instant << "ps)";
      }
    }
    if (e.verdict.overload) std::cout << " [overload]";
    std::cout << "\n";
  }
  const bool ok = result.schedulable();
  std::cout << "overall    : " << (ok ? "SCHEDULABLE" : "NOT SCHEDULABLE") << "\n";
  if (!opts.out_dir.empty()) {
    write_file(opts.out_dir, "analyze.json",
               bbt::analyze_report_json(s, violations, result, prov));
  }
  return ok ? kExitOk : kExitInfeasible;
}

void print_trace_summary(const bbt::sim_trace& trace, bbt::time_ps agg_bound) {
  bbt::time_ps max_delay = 0;
  std::int64_t missed = 0;
  for (const auto& f : trace.flows) {
    max_delay = std::max(max_delay, f.max_delay);
    missed += f.missed;
  }
  std::cout << "packets  : generated=" << trace.generated << " delivered=" << trace.delivered
            << " in-flight=" << trace.in_flight << "\n";
  std::cout << "max delay: " << bbt::format_ps(max_delay) << ", misses: " << missed << "\n";
  std::cout << "agg bound: " << bbt::format_ps(agg_bound) << "\n";
  for (const auto& w : trace.warnings) std::cout << "warning: " << w << "\n";
}

int cmd_simulate(const common_opts& opts, bool record_packets) {
  const bbt::scenario s = load(opts);
  const bbt::provenance base_prov{bbt::scenario_hash(s), s.seed};
  const bbt::time_ps agg_bound = bbt::aggregation_delay_bound(s.topology);
  std::cout << "scenario : " << bbt::hash_hex(base_prov.scenario_hash) << " (seed " << s.seed
            << ")\n";

  if (!s.sweep_arities.empty()) {
    // per-edge mix = the flows of edge 0
    std::vector<bbt::radio_flow> mix;
    for (const auto& f : s.flows) {
      if (f.edge == 0) mix.push_back(f);
    }
    auto cfg = s.make_sim_config();
    cfg.phase_list.clear();  // per-q flow counts differ; explicit lists do not scale
    if (cfg.phases == bbt::phase_mode::explicit_list) cfg.phases = bbt::phase_mode::synchronous;
    const auto points = bbt::sweep_scale(s.topology, s.sweep_arities, mix, s.scheduler,
                                         cfg, s.sweep_stagger);
    bbt::time_ps lo = points.front().max_delay, hi = points.front().max_delay;
    for (const auto& pt : points) {
      std::cout << "q=" << pt.q << " radios=" << pt.radios
                << " max_delay=" << bbt::format_ps(pt.max_delay) << "\n";
      lo = std::min(lo, pt.max_delay);
      hi = std::max(hi, pt.max_delay);
      if (!opts.out_dir.empty()) {
        bbt::scenario sq = s;
        sq.topology.arity = pt.q;
        write_file(opts.out_dir, "summary_q" + std::to_string(pt.q) + ".json",
                   bbt::simulation_summary_json(sq, pt.trace, base_prov));
      }
    }
    std::cout << "max-delay spread: " << bbt::format_ps(hi - lo) << "\n";
    std::cout << "scaling check (growth within 300ns): "
              << (points.back().max_delay - points.front().max_delay <= 300'000 ? "yes" : "NO")
              << "\n";
    return kExitOk;
  }

  for (int rep = 0; rep < s.repetitions; ++rep) {
    auto cfg = s.make_sim_config();
    cfg.seed = s.seed + static_cast<std::uint64_t>(rep);
    cfg.record_packets = record_packets;
    const bbt::provenance prov{base_prov.scenario_hash, cfg.seed};
    const auto trace = bbt::run_simulation(s.topology, s.flows, s.scheduler, cfg);
    if (s.repetitions > 1) std::cout << "--- repetition " << rep << " (seed " << cfg.seed << ")\n";
    print_trace_summary(trace, agg_bound);
    if (!opts.out_dir.empty()) {
      const std::string sfx = s.repetitions > 1 ? "_r" + std::to_string(rep) : "";
      std::ostringstream csv;
      bbt::write_flow_csv(csv, trace, prov);
      write_file(opts.out_dir, "flows" + sfx + ".csv", csv.str());
      write_file(opts.out_dir, "summary" + sfx + ".json",
                 bbt::simulation_summary_json(s, trace, prov));
    }
  }
  return kExitOk;
}

int cmd_optimize(const common_opts& opts, bool lattice_csv) {
  const bbt::scenario s = load(opts);
  if (!s.optimization) {
    std::cerr << "optimize: scenario has no [optimization] section\n";
    return kExitParse;
  }
  const auto& o = *s.optimization;
  for (const auto& f : s.flows) {
    if (!f.has_sampling_params()) {
      std::cerr << "optimize: flow " << f.id
                << " has no sampling frequency; quantization search needs f= flows\n";
      return kExitParse;
    }
  }
  const bbt::provenance prov{bbt::scenario_hash(s), o.seed};
  const auto ens = bbt::channel_ensemble::generate(
      static_cast<int>(s.flows.size()), o.tx_antennas, o.realizations, o.tx_power,
      o.noise_power, o.seed);
  const auto noise = bbt::quant_noise_model::uniform();
  const auto rep = bbt::bfs_search(s.topology, s.flows, o.ladder, ens, noise, o.policy);

  std::cout << "scenario : " << bbt::hash_hex(prov.scenario_hash) << "\n";
  if (rep.best) {
    std::cout << "Q* = [";
    for (std::size_t i = 0; i < rep.best->size(); ++i) {
      std::cout << (i ? " " : "") << (*rep.best)[i];
    }
    std::cout << "]\n";
  } else {
    std::cout << "Q* = none (no schedulable quantization)\n";
  }
  std::cout << "C* = " << rep.capacity << " b/s/Hz\n";
  std::cout << "nodes: expanded=" << rep.nodes_expanded << " evaluated=" << rep.nodes_evaluated
            << " wall=" << rep.wall_ms << "ms\n";

  std::string oracle_line;
  double lattice = 1.0;
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    lattice *= static_cast<double>(o.ladder.levels.size());
  }
  const bool run_oracle =
      o.oracle == bbt::oracle_mode::on ||
      (o.oracle == bbt::oracle_mode::automatic && lattice <= 4096.0);
  if (run_oracle) {
    const auto ref = bbt::brute_force_oracle(s.topology, s.flows, o.ladder, ens, noise, o.policy);
    oracle_line = ref.capacity == rep.capacity ? "match" : "MISMATCH";
    std::cout << "oracle: " << oracle_line << " (exhaustive C* = " << ref.capacity << ")\n";
  }

  if (!opts.out_dir.empty()) {
    write_file(opts.out_dir, "search.json", bbt::search_report_json(s, rep, oracle_line, prov));
    if (lattice_csv) {
      std::ostringstream csv;
      bbt::write_lattice_csv(csv, rep, prov);
      write_file(opts.out_dir, "lattice.csv", csv.str());
    }
  }
  if (!oracle_line.empty() && oracle_line != "match") return kExitRuntime;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"real-time baseband transport over symmetric fat trees: "
               "schedulability analysis, packet-level simulation and "
               "capacity-maximizing quantization search"};
  app.require_subcommand(1);

  common_opts opts;
  bool record_packets = false;
  bool lattice_csv = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", opts.scenario_path, "scenario file")->required();
    sub->add_option("--out", opts.out_dir, "directory for result files");
    sub->add_option("--seed", opts.seed_override, "override the scenario seed");
    sub->add_option("--horizon", opts.horizon_override,
                    "override the simulation horizon (e.g. 10ms)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the design requirements");
  add_common(validate);
  CLI::App* analyze =
      app.add_subcommand("analyze", "delay bounds and per-edge schedulability");
  add_common(analyze);
  CLI::App* simulate = app.add_subcommand("simulate", "packet-level simulation");
  add_common(simulate);
  simulate->add_flag("--record", record_packets, "keep per-packet records in memory");
  CLI::App* optimize =
      app.add_subcommand("optimize", "schedulability-constrained quantization search");
  add_common(optimize);
  optimize->add_flag("--lattice", lattice_csv, "also export the explored lattice CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate->parsed()) return cmd_validate(opts);
    if (analyze->parsed()) return cmd_analyze(opts);
    if (simulate->parsed()) return cmd_simulate(opts, record_packets);
    if (optimize->parsed()) return cmd_optimize(opts, lattice_csv);
  } catch (const bbt::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
