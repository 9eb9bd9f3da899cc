#include "bbt/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <span>
#include <sstream>

namespace bbt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct scaled_unit {
  const char* suffix;
  std::int64_t scale;
};

// "2.5Gbps" -> 2500000000 with one half-up rounding on the decimal part
std::int64_t parse_scaled(const std::string& text, std::span<const scaled_unit> units,
                          const char* kind) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  while (pos < t.size() &&
         (std::isdigit(static_cast<unsigned char>(t[pos])) || t[pos] == '.')) {
    ++pos;
  }
  const std::string digits = t.substr(0, pos);
  const std::string suffix = t.substr(pos);
  if (digits.empty()) throw std::invalid_argument(std::string("missing number in ") + kind);
  if (suffix.empty()) {
    throw std::invalid_argument(std::string("missing unit on ") + kind + " '" + t +
                                "' (unit-less numbers are rejected)");
  }
  const scaled_unit* unit = nullptr;
  for (const auto& u : units) {
    if (suffix == u.suffix) {
      unit = &u;
      break;
    }
  }
  if (!unit) {
    throw std::invalid_argument(std::string("unknown ") + kind + " unit '" + suffix + "'");
  }

  const std::size_t dot = digits.find('.');
  std::string whole = dot == std::string::npos ? digits : digits.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : digits.substr(dot + 1);
  if (whole.empty()) whole = "0";
  if (digits.find('.', dot + 1) != std::string::npos) {
    throw std::invalid_argument(std::string("malformed number '") + digits + "'");
  }
  if (whole.size() + frac.size() > 18) {
    throw std::invalid_argument(std::string("number too large in ") + kind);
  }
  __int128 num = 0;
  for (const char c : whole + frac) num = num * 10 + (c - '0');
  __int128 den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const __int128 value = (num * unit->scale * 2 + den) / (den * 2);
  if (value < 0 || value > std::numeric_limits<std::int64_t>::max()) {
    throw std::invalid_argument(std::string("value out of range in ") + kind);
  }
  return static_cast<std::int64_t>(value);
}

constexpr scaled_unit kTimeUnits[] = {
    {"ps", 1}, {"ns", kPsPerNs}, {"us", kPsPerUs}, {"ms", kPsPerMs}, {"s", kPsPerSec}};
constexpr scaled_unit kRateUnits[] = {{"bps", 1},
                                      {"kbps", 1'000},
                                      {"Mbps", 1'000'000},
                                      {"Gbps", 1'000'000'000},
                                      {"Tbps", 1'000'000'000'000}};
constexpr scaled_unit kFreqUnits[] = {
    {"Hz", 1}, {"kHz", 1'000}, {"MHz", 1'000'000}, {"GHz", 1'000'000'000}};
constexpr scaled_unit kSizeUnits[] = {
    {"bit", 1}, {"bits", 1}, {"B", 8}, {"KB", 8'000}, {"MB", 8'000'000}};

std::int64_t parse_plain_int(const std::string& text, const char* kind) {
  const std::string t = trim(text);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    throw std::invalid_argument(std::string("expected a plain non-negative integer for ") + kind);
  }
  if (t.size() > 18) throw std::invalid_argument(std::string("number too large in ") + kind);
  return std::stoll(t);
}

double parse_plain_double(const std::string& text, const char* kind) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("expected a plain number for ") + kind);
  }
}

}  // namespace

time_ps parse_time(const std::string& text) { return parse_scaled(text, kTimeUnits, "time"); }
bits_per_sec parse_rate(const std::string& text) { return parse_scaled(text, kRateUnits, "rate"); }
std::int64_t parse_frequency(const std::string& text) {
  return parse_scaled(text, kFreqUnits, "frequency");
}
std::int64_t parse_size_bits(const std::string& text) {
  return parse_scaled(text, kSizeUnits, "size");
}

const char* policy_name(edge_policy p) {
  switch (p) {
    case edge_policy::fifo: return "fifo";
    case edge_policy::np_edf: return "edf";
    case edge_policy::np_fixed_priority: return "rate-monotonic";
  }
  return "?";
}

edge_policy policy_from_name(const std::string& name) {
  if (name == "fifo") return edge_policy::fifo;
  if (name == "edf") return edge_policy::np_edf;
  if (name == "rate-monotonic" || name == "fixed-priority") {
    return edge_policy::np_fixed_priority;
  }
  throw std::invalid_argument("unknown scheduler '" + name +
                              "' (fifo | edf | rate-monotonic)");
}

parse_error::parse_error(const std::string& origin, int line, const std::string& field,
                         const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": [" + field + "] " + message),
      line_(line),
      field_(field) {}

sim_config scenario::make_sim_config() const {
  sim_config cfg;
  cfg.horizon = horizon;
  cfg.phases = phases;
  cfg.phase_list = flow_phases;
  cfg.seed = seed;
  return cfg;
}

namespace {

struct raw_entry {
  int line;
  std::string key;
  std::string value;
};

struct flow_line {
  int line;
  std::map<std::string, std::string> kv;
};

class scenario_builder {
 public:
  explicit scenario_builder(const std::string& origin) : origin_(origin) {}

  [[noreturn]] void fail(int line, const std::string& field, const std::string& msg) const {
    throw parse_error(origin_, line, field, msg);
  }

  template <typename F>
  auto with_field(int line, const std::string& field, F&& fn) const {
    try {
      return fn();
    } catch (const std::exception& e) {
      fail(line, field, e.what());
    }
  }

  std::string origin_;
};

}  // namespace

scenario parse_scenario(const std::string& text, const std::string& origin) {
  scenario_builder b(origin);
  std::map<std::string, std::vector<raw_entry>> sections;
  std::vector<flow_line> flow_lines;

  std::string section;
  int line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') b.fail(line_no, "section", "missing ']'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) b.fail(line_no, "section", "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) b.fail(line_no, section, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) b.fail(line_no, key, "key outside any [section]");
    if (section == "flows") {
      if (key != "flow") b.fail(line_no, "flows." + key, "only 'flow = ...' entries are allowed");
      flow_line fl;
      fl.line = line_no;
      for (const auto& tok : split_ws(value)) {
        const std::size_t teq = tok.find('=');
        if (teq == std::string::npos) {
          b.fail(line_no, "flows.flow", "expected k=v tokens, got '" + tok + "'");
        }
        fl.kv[tok.substr(0, teq)] = tok.substr(teq + 1);
      }
      flow_lines.push_back(std::move(fl));
    } else {
      sections[section].push_back({line_no, key, value});
    }
  }

  auto find = [&sections](const std::string& sec, const std::string& key) -> const raw_entry* {
    const auto it = sections.find(sec);
    if (it == sections.end()) return nullptr;
    for (const auto& e : it->second) {
      if (e.key == key) return &e;
    }
    return nullptr;
  };
  auto require = [&](const std::string& sec, const std::string& key) -> const raw_entry& {
    const raw_entry* e = find(sec, key);
    if (!e) b.fail(0, sec + "." + key, "missing required key");
    return *e;
  };

  scenario s;

  // ---- topology ----
  {
    const auto& arity = require("topology", "arity");
    s.topology.arity = static_cast<int>(b.with_field(
        arity.line, "topology.arity", [&] { return parse_plain_int(arity.value, "arity"); }));
    const auto& height = require("topology", "height");
    s.topology.height = static_cast<int>(b.with_field(
        height.line, "topology.height", [&] { return parse_plain_int(height.value, "height"); }));
    if (s.topology.arity < 1) b.fail(arity.line, "topology.arity", "arity must be >= 1");
    if (s.topology.height < 1) b.fail(height.line, "topology.height", "height must be >= 1");

    const auto& caps = require("topology", "link_capacity");
    for (const auto& tok : split_ws(caps.value)) {
      s.topology.link_caps.push_back(b.with_field(
          caps.line, "topology.link_capacity", [&] { return parse_rate(tok); }));
    }
    if (static_cast<int>(s.topology.link_caps.size()) != s.topology.height + 1) {
      b.fail(caps.line, "topology.link_capacity",
             "expected " + std::to_string(s.topology.height + 1) +
                 " capacities (edge uplink through root-destination)");
    }
    const auto& ts = require("topology", "switch_delay");
    s.topology.switch_delay =
        b.with_field(ts.line, "topology.switch_delay", [&] { return parse_time(ts.value); });
    const auto& tp = require("topology", "propagation_delay");
    s.topology.prop_delay =
        b.with_field(tp.line, "topology.propagation_delay", [&] { return parse_time(tp.value); });
    const auto& pkt = require("topology", "packet_size");
    s.topology.packet_bits =
        b.with_field(pkt.line, "topology.packet_size", [&] { return parse_size_bits(pkt.value); });
    if (const raw_entry* src = find("topology", "source_link")) {
      s.topology.source_link =
          b.with_field(src->line, "topology.source_link", [&] { return parse_rate(src->value); });
    }
  }

  // ---- background (optional) ----
  if (sections.count("background")) {
    background_spec bg;
    const auto& size = require("background", "packet_size");
    bg.packet_bits = b.with_field(size.line, "background.packet_size",
                                  [&] { return parse_size_bits(size.value); });
    if (const raw_entry* loc = find("background", "location")) {
      if (loc->value == "edge") {
        bg.where = background_spec::attach::edge;
      } else if (loc->value == "aggregation") {
        bg.where = background_spec::attach::aggregation;
      } else if (loc->value == "everywhere") {
        bg.where = background_spec::attach::everywhere;
      } else {
        b.fail(loc->line, "background.location", "edge | aggregation | everywhere");
      }
    }
    s.topology.background = bg;
  }

  // ---- flows ----
  if (flow_lines.empty()) b.fail(0, "flows", "at least one flow is required");
  const int num_edges = s.topology.num_edges();
  s.topology.edge_radios.assign(static_cast<std::size_t>(num_edges), {});
  int next_id = 0;
  for (const auto& fl : flow_lines) {
    auto get = [&](const char* key) -> std::optional<std::string> {
      const auto it = fl.kv.find(key);
      if (it == fl.kv.end()) return std::nullopt;
      return it->second;
    };
    for (const auto& [k, v] : fl.kv) {
      if (k != "rate" && k != "f" && k != "quant" && k != "deadline" && k != "edge" &&
          k != "phase") {
        b.fail(fl.line, "flows.flow", "unknown flow attribute '" + k + "'");
      }
    }

    std::vector<int> edges;
    const auto edge_attr = get("edge");
    if (!edge_attr) b.fail(fl.line, "flows.flow.edge", "missing edge assignment");
    if (*edge_attr == "all") {
      for (int e = 0; e < num_edges; ++e) edges.push_back(e);
    } else {
      const int e = static_cast<int>(b.with_field(
          fl.line, "flows.flow.edge", [&] { return parse_plain_int(*edge_attr, "edge"); }));
      if (e < 0 || e >= num_edges) {
        b.fail(fl.line, "flows.flow.edge",
               "edge " + std::to_string(e) + " outside 0.." + std::to_string(num_edges - 1));
      }
      edges.push_back(e);
    }

    for (const int e : edges) {
      radio_flow f;
      f.id = next_id++;
      f.edge = e;
      f.payload_bits = s.topology.packet_bits;
      if (const auto rate = get("rate")) {
        if (get("f") || get("quant")) {
          b.fail(fl.line, "flows.flow", "give either rate or (f, quant), not both");
        }
        f.rate = b.with_field(fl.line, "flows.flow.rate", [&] { return parse_rate(*rate); });
      } else {
        const auto freq = get("f");
        const auto quant = get("quant");
        if (!freq || !quant) {
          b.fail(fl.line, "flows.flow", "flow needs rate=... or f=... quant=...");
        }
        f.sample_hz =
            b.with_field(fl.line, "flows.flow.f", [&] { return parse_frequency(*freq); });
        f.quant_bits = static_cast<int>(b.with_field(
            fl.line, "flows.flow.quant", [&] { return parse_plain_int(*quant, "quant"); }));
        f.rate = b.with_field(fl.line, "flows.flow.quant",
                              [&] { return flow_rate(f.quant_bits, f.sample_hz); });
      }

      const auto deadline = get("deadline");
      if (!deadline) b.fail(fl.line, "flows.flow.deadline", "missing deadline");
      if (*deadline == "period") {
        f.deadline = b.with_field(fl.line, "flows.flow.deadline", [&] { return f.period(); });
      } else {
        f.deadline = b.with_field(fl.line, "flows.flow.deadline",
                                  [&] { return parse_time(*deadline); });
      }

      time_ps phase = 0;
      if (const auto ph = get("phase")) {
        phase = b.with_field(fl.line, "flows.flow.phase", [&] { return parse_time(*ph); });
      }

      s.flows.push_back(f);
      s.flow_phases.push_back(phase);
      s.topology.edge_radios[static_cast<std::size_t>(e)].push_back(f.id);
    }
  }

  // ---- simulation ----
  if (const raw_entry* e = find("simulation", "horizon")) {
    s.horizon = b.with_field(e->line, "simulation.horizon", [&] { return parse_time(e->value); });
  }
  if (const raw_entry* e = find("simulation", "phases")) {
    if (e->value == "synchronous") {
      s.phases = phase_mode::synchronous;
    } else if (e->value == "random") {
      s.phases = phase_mode::seeded_random;
    } else if (e->value == "explicit") {
      s.phases = phase_mode::explicit_list;
    } else {
      b.fail(e->line, "simulation.phases", "synchronous | random | explicit");
    }
  }
  if (const raw_entry* e = find("simulation", "seed")) {
    s.seed = static_cast<std::uint64_t>(b.with_field(
        e->line, "simulation.seed", [&] { return parse_plain_int(e->value, "seed"); }));
  }
  if (const raw_entry* e = find("simulation", "scheduler")) {
    s.scheduler = b.with_field(e->line, "simulation.scheduler",
                               [&] { return policy_from_name(e->value); });
  }
  if (const raw_entry* e = find("simulation", "repetitions")) {
    s.repetitions = static_cast<int>(b.with_field(
        e->line, "simulation.repetitions", [&] { return parse_plain_int(e->value, "repetitions"); }));
    if (s.repetitions < 1) b.fail(e->line, "simulation.repetitions", "must be >= 1");
  }
  if (const raw_entry* e = find("simulation", "sweep_arity")) {
    for (const auto& tok : split_ws(e->value)) {
      s.sweep_arities.push_back(static_cast<int>(b.with_field(
          e->line, "simulation.sweep_arity", [&] { return parse_plain_int(tok, "arity"); })));
    }
  }
  if (const raw_entry* e = find("simulation", "sweep_stagger")) {
    s.sweep_stagger = b.with_field(e->line, "simulation.sweep_stagger",
                                   [&] { return parse_time(e->value); });
  }

  // ---- optimization (optional) ----
  if (sections.count("optimization")) {
    optimization_section opt;
    const auto& ladder = require("optimization", "ladder");
    for (const auto& tok : split_ws(ladder.value)) {
      opt.ladder.levels.push_back(static_cast<int>(b.with_field(
          ladder.line, "optimization.ladder", [&] { return parse_plain_int(tok, "ladder"); })));
    }
    b.with_field(ladder.line, "optimization.ladder", [&] {
      opt.ladder.validate();
      return 0;
    });
    if (const raw_entry* e = find("optimization", "tx_antennas")) {
      opt.tx_antennas = static_cast<int>(b.with_field(
          e->line, "optimization.tx_antennas", [&] { return parse_plain_int(e->value, "tx_antennas"); }));
    }
    if (const raw_entry* e = find("optimization", "tx_power")) {
      opt.tx_power = b.with_field(e->line, "optimization.tx_power",
                                  [&] { return parse_plain_double(e->value, "tx_power"); });
    }
    if (const raw_entry* e = find("optimization", "noise_power")) {
      opt.noise_power = b.with_field(e->line, "optimization.noise_power",
                                     [&] { return parse_plain_double(e->value, "noise_power"); });
    }
    if (const raw_entry* e = find("optimization", "realizations")) {
      opt.realizations = static_cast<int>(b.with_field(
          e->line, "optimization.realizations",
          [&] { return parse_plain_int(e->value, "realizations"); }));
    }
    if (const raw_entry* e = find("optimization", "seed")) {
      opt.seed = static_cast<std::uint64_t>(b.with_field(
          e->line, "optimization.seed", [&] { return parse_plain_int(e->value, "seed"); }));
    }
    if (const raw_entry* e = find("optimization", "scheduler")) {
      opt.policy = b.with_field(e->line, "optimization.scheduler",
                                [&] { return policy_from_name(e->value); });
      if (opt.policy == edge_policy::fifo) {
        b.fail(e->line, "optimization.scheduler", "the search needs a non-preemptive test (edf | rate-monotonic)");
      }
    }
    if (const raw_entry* e = find("optimization", "oracle")) {
      if (e->value == "off") {
        opt.oracle = oracle_mode::off;
      } else if (e->value == "auto") {
        opt.oracle = oracle_mode::automatic;
      } else if (e->value == "on") {
        opt.oracle = oracle_mode::on;
      } else {
        b.fail(e->line, "optimization.oracle", "off | auto | on");
      }
    }
    s.optimization = opt;
  }

  if (s.phases == phase_mode::explicit_list &&
      s.flow_phases.size() != s.flows.size()) {
    b.fail(0, "simulation.phases", "explicit phases need one phase per flow");
  }
  return s;
}

scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "file", "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string canonical_scenario(const scenario& s) {
  std::ostringstream os;
  os << "[topology]\n";
  os << "arity = " << s.topology.arity << "\n";
  os << "height = " << s.topology.height << "\n";
  os << "link_capacity =";
  for (const auto c : s.topology.link_caps) os << " " << c << "bps";
  os << "\n";
  os << "switch_delay = " << s.topology.switch_delay << "ps\n";
  os << "propagation_delay = " << s.topology.prop_delay << "ps\n";
  os << "packet_size = " << s.topology.packet_bits << "bit\n";
  if (s.topology.source_link) os << "source_link = " << *s.topology.source_link << "bps\n";
  if (s.topology.background) {
    os << "\n[background]\n";
    os << "packet_size = " << s.topology.background->packet_bits << "bit\n";
    os << "location = ";
    switch (s.topology.background->where) {
      case background_spec::attach::edge: os << "edge"; break;
      case background_spec::attach::aggregation: os << "aggregation"; break;
      case background_spec::attach::everywhere: os << "everywhere"; break;
    }
    os << "\n";
  }
  os << "\n[flows]\n";
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    const auto& f = s.flows[i];
    os << "flow =";
    if (f.has_sampling_params()) {
      os << " f=" << f.sample_hz << "Hz quant=" << f.quant_bits;
    } else {
      os << " rate=" << f.rate << "bps";
    }
    os << " deadline=" << f.deadline << "ps edge=" << f.edge;
    os << " phase=" << (i < s.flow_phases.size() ? s.flow_phases[i] : 0) << "ps\n";
  }
  os << "\n[simulation]\n";
  os << "horizon = " << s.horizon << "ps\n";
  os << "phases = ";
  switch (s.phases) {
    case phase_mode::synchronous: os << "synchronous"; break;
    case phase_mode::seeded_random: os << "random"; break;
    case phase_mode::explicit_list: os << "explicit"; break;
  }
  os << "\n";
  os << "seed = " << s.seed << "\n";
  os << "scheduler = " << policy_name(s.scheduler) << "\n";
  os << "repetitions = " << s.repetitions << "\n";
  if (!s.sweep_arities.empty()) {
    os << "sweep_arity =";
    for (const int q : s.sweep_arities) os << " " << q;
    os << "\n";
  }
  if (s.sweep_stagger != 0) os << "sweep_stagger = " << s.sweep_stagger << "ps\n";
  if (s.optimization) {
    const auto& o = *s.optimization;
    os << "\n[optimization]\n";
    os << "ladder =";
    for (const int l : o.ladder.levels) os << " " << l;
    os << "\n";
    os << "tx_antennas = " << o.tx_antennas << "\n";
    os << "tx_power = " << std::setprecision(17) << o.tx_power << "\n";
    os << "noise_power = " << std::setprecision(17) << o.noise_power << "\n";
    os << "realizations = " << o.realizations << "\n";
    os << "seed = " << o.seed << "\n";
    os << "scheduler = " << policy_name(o.policy) << "\n";
    os << "oracle = ";
    switch (o.oracle) {
      case oracle_mode::off: os << "off"; break;
      case oracle_mode::automatic: os << "auto"; break;
      case oracle_mode::on: os << "on"; break;
    }
    os << "\n";
  }
  return os.str();
}

std::uint64_t scenario_hash(const scenario& s) {
  const std::string text = canonical_scenario(s);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace bbt
