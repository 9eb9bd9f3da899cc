// Python bindings for the baseband-transport toolkit: traffic arithmetic,
// link schedulability tests, the fat-tree delay analysis, the packet-level
// simulator and the quantization search.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bbt/capacity.hpp"
#include "bbt/report.hpp"
#include "bbt/scenario.hpp"
#include "bbt/sched.hpp"
#include "bbt/sim.hpp"
#include "bbt/topology.hpp"
#include "bbt/traffic.hpp"

namespace py = pybind11;
using namespace bbt;

PYBIND11_MODULE(_core, m) {
  m.doc() = "real-time baseband transport over symmetric fat trees";
  m.attr("__version__") = kToolVersion;
  m.attr("PS_PER_NS") = kPsPerNs;
  m.attr("PS_PER_US") = kPsPerUs;
  m.attr("PS_PER_MS") = kPsPerMs;
  m.attr("PS_PER_SEC") = kPsPerSec;

  // ---- traffic model ----
  m.def("flow_rate", &flow_rate, py::arg("quant_bits"), py::arg("sample_hz"),
        "transport rate 2*Q*f in bits/s");
  m.def("inter_arrival", &inter_arrival, py::arg("payload_bits"), py::arg("rate"),
        "packet inter-arrival time in picoseconds (round half-up)");
  m.def("transport_deadline", &transport_deadline, py::arg("protocol_deadline"),
        py::arg("processing_time"));

  py::class_<traffic_spec>(m, "TrafficSpec")
      .def(py::init([](time_ps period, time_ps deadline, time_ps tx_time) {
             return traffic_spec{period, deadline, tx_time};
           }),
           py::arg("period"), py::arg("deadline"), py::arg("tx_time"))
      .def_readwrite("period", &traffic_spec::period)
      .def_readwrite("deadline", &traffic_spec::deadline)
      .def_readwrite("tx_time", &traffic_spec::tx_time)
      .def("__repr__", [](const traffic_spec& t) {
        std::ostringstream os;
        os << "TrafficSpec(period=" << t.period << ", deadline=" << t.deadline
           << ", tx_time=" << t.tx_time << ")";
        return os.str();
      });

  py::class_<radio_flow>(m, "RadioFlow")
      .def_readwrite("id", &radio_flow::id)
      .def_readwrite("sample_hz", &radio_flow::sample_hz)
      .def_readwrite("quant_bits", &radio_flow::quant_bits)
      .def_readwrite("rate", &radio_flow::rate)
      .def_readwrite("payload_bits", &radio_flow::payload_bits)
      .def_readwrite("deadline", &radio_flow::deadline)
      .def_readwrite("edge", &radio_flow::edge)
      .def("period", &radio_flow::period)
      .def("has_sampling_params", &radio_flow::has_sampling_params);
  m.def("make_radio_flow", &make_radio_flow, py::arg("id"), py::arg("sample_hz"),
        py::arg("quant_bits"), py::arg("payload_bits"), py::arg("deadline"), py::arg("edge"));
  m.def("make_rate_flow", &make_rate_flow, py::arg("id"), py::arg("rate"),
        py::arg("payload_bits"), py::arg("deadline"), py::arg("edge"));

  // ---- link schedulability ----
  py::class_<flow_set>(m, "FlowSet")
      .def(py::init<>())
      .def(py::init([](std::vector<traffic_spec> flows) {
             flow_set fs;
             fs.flows = std::move(flows);
             return fs;
           }),
           py::arg("flows"))
      .def_readwrite("flows", &flow_set::flows)
      .def_readwrite("np_blocking", &flow_set::np_blocking)
      .def("tx_time", &flow_set::tx_time);

  py::enum_<horizon_kind>(m, "HorizonKind")
      .value("none", horizon_kind::none)
      .value("busy_period", horizon_kind::busy_period)
      .value("hyperperiod", horizon_kind::hyperperiod);

  py::class_<sched_witness>(m, "SchedWitness")
      .def_readonly("instant", &sched_witness::instant)
      .def_readonly("flow", &sched_witness::flow)
      .def_readonly("job", &sched_witness::job);

  py::class_<sched_verdict>(m, "SchedVerdict")
      .def_readonly("schedulable", &sched_verdict::schedulable)
      .def_readonly("witness", &sched_verdict::witness)
      .def_readonly("overload", &sched_verdict::overload)
      .def_readonly("horizon", &sched_verdict::horizon)
      .def("__bool__", [](const sched_verdict& v) { return v.schedulable; })
      .def("__repr__", [](const sched_verdict& v) {
        return std::string("SchedVerdict(") + (v.schedulable ? "schedulable" : "unschedulable") +
               (v.overload ? ", overload" : "") + ")";
      });

  m.def("edf_test",
        [](const flow_set& fs, bool preemptive) { return edf_test(fs, preemptive); },
        py::arg("flow_set"), py::arg("preemptive"));
  m.def("fixed_priority_test",
        [](const flow_set& fs, bool preemptive) {
          return fixed_priority_test(fs, preemptive);
        },
        py::arg("flow_set"), py::arg("preemptive"));
  m.def("rate_monotonic_order", &rate_monotonic_order, py::arg("flow_set"));
  m.def("edf_expression", &edf_expression, py::arg("flow_set"), py::arg("preemptive"),
        py::arg("t"), "literal demand-ratio re-evaluation at an instant");

  // ---- topology ----
  py::class_<background_spec> bg(m, "BackgroundSpec");
  py::enum_<background_spec::attach>(bg, "Attach")
      .value("edge", background_spec::attach::edge)
      .value("aggregation", background_spec::attach::aggregation)
      .value("everywhere", background_spec::attach::everywhere);
  bg.def(py::init<>())
      .def_readwrite("packet_bits", &background_spec::packet_bits)
      .def_readwrite("where", &background_spec::where);

  py::class_<fat_tree_topology>(m, "FatTreeTopology")
      .def(py::init<>())
      .def_readwrite("arity", &fat_tree_topology::arity)
      .def_readwrite("height", &fat_tree_topology::height)
      .def_readwrite("link_caps", &fat_tree_topology::link_caps)
      .def_readwrite("switch_delay", &fat_tree_topology::switch_delay)
      .def_readwrite("prop_delay", &fat_tree_topology::prop_delay)
      .def_readwrite("packet_bits", &fat_tree_topology::packet_bits)
      .def_readwrite("edge_radios", &fat_tree_topology::edge_radios)
      .def_readwrite("source_link", &fat_tree_topology::source_link)
      .def_readwrite("background", &fat_tree_topology::background)
      .def("num_edges", &fat_tree_topology::num_edges)
      .def("num_radios", &fat_tree_topology::num_radios)
      .def("tx_time", &fat_tree_topology::tx_time, py::arg("level"));

  m.def("validate_topology",
        [](const fat_tree_topology& t, const std::vector<radio_flow>& flows) {
          std::vector<std::pair<std::string, std::string>> out;
          for (const auto& v : validate_topology(t, flows)) {
            out.emplace_back(v.requirement, v.detail);
          }
          return out;
        },
        py::arg("topology"), py::arg("flows") = std::vector<radio_flow>{});
  m.def("max_queuing_per_hop", &max_queuing_per_hop, py::arg("topology"), py::arg("level"));
  m.def("aggregation_delay_bound", &aggregation_delay_bound, py::arg("topology"));

  py::class_<delay_budget>(m, "DelayBudget")
      .def_readonly("agg_bound", &delay_budget::agg_bound)
      .def_readonly("edge_budget", &delay_budget::edge_budget)
      .def_readonly("edge_deadlines", &delay_budget::edge_deadlines);
  m.def("compute_delay_budget",
        [](const fat_tree_topology& t, const std::vector<radio_flow>& flows) {
          return compute_delay_budget(t, flows);
        },
        py::arg("topology"), py::arg("flows"));

  py::enum_<edge_policy>(m, "EdgePolicy")
      .value("fifo", edge_policy::fifo)
      .value("np_edf", edge_policy::np_edf)
      .value("np_fixed_priority", edge_policy::np_fixed_priority);

  py::class_<edge_verdict>(m, "EdgeVerdict")
      .def_readonly("edge", &edge_verdict::edge)
      .def_readonly("verdict", &edge_verdict::verdict)
      .def_readonly("flow_ids", &edge_verdict::flow_ids);

  py::class_<e2e_result>(m, "E2EResult")
      .def_readonly("budget", &e2e_result::budget)
      .def_readonly("per_edge", &e2e_result::per_edge)
      .def_readonly("infeasible_flows", &e2e_result::infeasible_flows)
      .def("schedulable", &e2e_result::schedulable)
      .def("__bool__", [](const e2e_result& r) { return r.schedulable(); });

  m.def("e2e_schedulable",
        [](const fat_tree_topology& t, const std::vector<radio_flow>& flows,
           edge_policy policy) { return e2e_schedulable(t, flows, policy); },
        py::arg("topology"), py::arg("flows"), py::arg("policy"));

  // ---- simulation ----
  py::enum_<phase_mode>(m, "PhaseMode")
      .value("synchronous", phase_mode::synchronous)
      .value("seeded_random", phase_mode::seeded_random)
      .value("explicit_list", phase_mode::explicit_list);

  py::class_<sim_config>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("horizon", &sim_config::horizon)
      .def_readwrite("phases", &sim_config::phases)
      .def_readwrite("phase_list", &sim_config::phase_list)
      .def_readwrite("seed", &sim_config::seed)
      .def_readwrite("record_packets", &sim_config::record_packets)
      .def_readwrite("queue_cap", &sim_config::queue_cap);

  py::class_<sim_flow_stats>(m, "SimFlowStats")
      .def_readonly("flow", &sim_flow_stats::flow)
      .def_readonly("rate", &sim_flow_stats::rate)
      .def_readonly("generated", &sim_flow_stats::generated)
      .def_readonly("delivered", &sim_flow_stats::delivered)
      .def_readonly("missed", &sim_flow_stats::missed)
      .def_readonly("max_delay", &sim_flow_stats::max_delay)
      .def_readonly("min_delay", &sim_flow_stats::min_delay)
      .def_readonly("jitter", &sim_flow_stats::jitter)
      .def_readonly("max_post_edge", &sim_flow_stats::max_post_edge);

  py::class_<packet_record>(m, "PacketRecord")
      .def_readonly("flow", &packet_record::flow)
      .def_readonly("seq", &packet_record::seq)
      .def_readonly("gen", &packet_record::gen)
      .def_readonly("enq_edge", &packet_record::enq_edge)
      .def_readonly("dep_edge", &packet_record::dep_edge)
      .def_readonly("arr_agg", &packet_record::arr_agg)
      .def_readonly("delivered", &packet_record::delivered);

  py::class_<sim_trace>(m, "SimTrace")
      .def_readonly("flows", &sim_trace::flows)
      .def_readonly("max_queuing_by_level", &sim_trace::max_queuing_by_level)
      .def_readonly("generated", &sim_trace::generated)
      .def_readonly("delivered", &sim_trace::delivered)
      .def_readonly("in_flight", &sim_trace::in_flight)
      .def_readonly("packets", &sim_trace::packets)
      .def_readonly("warnings", &sim_trace::warnings);

  py::register_exception<sim_overload_error>(m, "SimOverloadError");

  m.def("run_simulation",
        [](const fat_tree_topology& t, const std::vector<radio_flow>& flows,
           edge_policy scheduler, const sim_config& cfg) {
          return run_simulation(t, flows, scheduler, cfg);
        },
        py::arg("topology"), py::arg("flows"), py::arg("scheduler"), py::arg("config"));

  py::class_<sweep_point>(m, "SweepPoint")
      .def_readonly("q", &sweep_point::q)
      .def_readonly("radios", &sweep_point::radios)
      .def_readonly("max_delay", &sweep_point::max_delay)
      .def_readonly("trace", &sweep_point::trace);

  m.def("sweep_scale",
        [](const fat_tree_topology& base, const std::vector<int>& arities,
           const std::vector<radio_flow>& mix, edge_policy scheduler, const sim_config& cfg,
           time_ps edge_stagger) {
          return sweep_scale(base, arities, mix, scheduler, cfg, edge_stagger);
        },
        py::arg("base"), py::arg("arities"), py::arg("per_edge_mix"), py::arg("scheduler"),
        py::arg("config"), py::arg("edge_stagger") = 0);

  m.def("make_phases",
        [](const std::vector<radio_flow>& flows, phase_mode mode, std::uint64_t seed,
           const std::vector<time_ps>& explicit_list) {
          return make_phases(flows, mode, seed, explicit_list);
        },
        py::arg("flows"), py::arg("mode"), py::arg("seed") = 0,
        py::arg("explicit_list") = std::vector<time_ps>{});

  // ---- capacity search ----
  py::class_<quant_ladder>(m, "QuantLadder")
      .def(py::init([](std::vector<int> levels) {
             quant_ladder l{std::move(levels)};
             l.validate();
             return l;
           }),
           py::arg("levels"))
      .def_readonly("levels", &quant_ladder::levels)
      .def("min_level", &quant_ladder::min_level)
      .def("max_level", &quant_ladder::max_level);

  py::class_<quant_noise_model>(m, "QuantNoiseModel")
      .def_static("uniform", &quant_noise_model::uniform,
                  py::arg("scale") = 2.721655269759087)
      .def(py::init([](std::function<double(int)> gamma) {
             quant_noise_model mdl;
             mdl.gamma = std::move(gamma);
             return mdl;
           }),
           py::arg("gamma"))
      .def("__call__", &quant_noise_model::operator());

  py::class_<channel_ensemble>(m, "ChannelEnsemble")
      .def_static("generate", &channel_ensemble::generate, py::arg("radios"),
                  py::arg("tx_antennas"), py::arg("count"), py::arg("tx_power"),
                  py::arg("noise_power"), py::arg("seed"))
      .def_readonly("tx_antennas", &channel_ensemble::tx_antennas)
      .def_readonly("radios", &channel_ensemble::radios)
      .def_readonly("tx_power", &channel_ensemble::tx_power)
      .def_readonly("noise_power", &channel_ensemble::noise_power)
      .def_readonly("seed", &channel_ensemble::seed)
      .def("size", [](const channel_ensemble& e) { return e.realizations.size(); })
      .def("capacity_at",
           [](const channel_ensemble& e, std::size_t index, const quant_vector& q,
              const quant_noise_model& noise) {
             return capacity_one(e.realizations.at(index), q, e.tx_power, e.noise_power,
                                 noise);
           },
           py::arg("index"), py::arg("q"), py::arg("noise"),
           "per-realization capacity for one channel draw");

  m.def("ergodic_capacity", &ergodic_capacity, py::arg("q"), py::arg("ensemble"),
        py::arg("noise"));
  m.def("enum_next", &enum_next, py::arg("q"), py::arg("ladder"));
  m.def("schedulable_under_q",
        [](const quant_vector& q, const fat_tree_topology& t,
           const std::vector<radio_flow>& radios, edge_policy policy) {
          return schedulable_under_q(q, t, radios, policy);
        },
        py::arg("q"), py::arg("topology"), py::arg("radios"), py::arg("policy"));

  py::class_<search_report>(m, "SearchReport")
      .def_readonly("best", &search_report::best)
      .def_readonly("capacity", &search_report::capacity)
      .def_readonly("nodes_expanded", &search_report::nodes_expanded)
      .def_readonly("nodes_evaluated", &search_report::nodes_evaluated)
      .def_readonly("wall_ms", &search_report::wall_ms)
      .def_readonly("evaluated", &search_report::evaluated);

  m.def("bfs_search",
        [](const fat_tree_topology& t, const std::vector<radio_flow>& radios,
           const quant_ladder& ladder, const channel_ensemble& ens,
           const quant_noise_model& noise, edge_policy policy) {
          return bfs_search(t, radios, ladder, ens, noise, policy);
        },
        py::arg("topology"), py::arg("radios"), py::arg("ladder"), py::arg("ensemble"),
        py::arg("noise"), py::arg("policy"));
  m.def("brute_force_oracle",
        [](const fat_tree_topology& t, const std::vector<radio_flow>& radios,
           const quant_ladder& ladder, const channel_ensemble& ens,
           const quant_noise_model& noise, edge_policy policy, std::int64_t cap) {
          return brute_force_oracle(t, radios, ladder, ens, noise, policy, cap);
        },
        py::arg("topology"), py::arg("radios"), py::arg("ladder"), py::arg("ensemble"),
        py::arg("noise"), py::arg("policy"), py::arg("cap") = 100'000);

  // ---- scenarios ----
  py::register_exception<parse_error>(m, "ParseError");

  py::class_<optimization_section>(m, "OptimizationSection")
      .def_readonly("ladder", &optimization_section::ladder)
      .def_readonly("tx_antennas", &optimization_section::tx_antennas)
      .def_readonly("tx_power", &optimization_section::tx_power)
      .def_readonly("noise_power", &optimization_section::noise_power)
      .def_readonly("realizations", &optimization_section::realizations)
      .def_readonly("seed", &optimization_section::seed)
      .def_readonly("policy", &optimization_section::policy);

  py::class_<scenario>(m, "Scenario")
      .def_readonly("topology", &scenario::topology)
      .def_readonly("flows", &scenario::flows)
      .def_readonly("flow_phases", &scenario::flow_phases)
      .def_readonly("horizon", &scenario::horizon)
      .def_readonly("phases", &scenario::phases)
      .def_readonly("seed", &scenario::seed)
      .def_readonly("repetitions", &scenario::repetitions)
      .def_readonly("scheduler", &scenario::scheduler)
      .def_readonly("sweep_arities", &scenario::sweep_arities)
      .def_readonly("sweep_stagger", &scenario::sweep_stagger)
      .def_readonly("optimization", &scenario::optimization)
      .def("sim_config", &scenario::make_sim_config);

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("origin") = "<memory>");
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("canonical_scenario", &canonical_scenario, py::arg("scenario"));
  m.def("scenario_hash", &scenario_hash, py::arg("scenario"));

  m.def("parse_time", &parse_time, py::arg("text"));
  m.def("parse_rate", &parse_rate, py::arg("text"));
  m.def("parse_frequency", &parse_frequency, py::arg("text"));
  m.def("parse_size_bits", &parse_size_bits, py::arg("text"));
}
