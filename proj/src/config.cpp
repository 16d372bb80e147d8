#include "dfsqec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dfsqec {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + v + "' for " + key);
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("bad non-negative integer '" + v + "' for " + key);
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range for " + key);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean '" + v + "' for " + key);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& Config::known_keys(const std::string& section) {
  static const std::vector<std::string> run = {"kind",   "states", "times",   "cycles",     "shots",
                                               "mode",   "seed",   "engine",  "layout",     "workers",
                                               "zone_batch", "assume_orthogonal"};
  static const std::vector<std::string> noise = {
      "preset",      "gamma_fast",   "Gamma_quasi", "zone_count", "pair_colocated",    "differential_fraction",
      "p1",          "p2",           "p_meas",      "p_spam_extra", "p_leak",          "tau_cycle",
      "field_sensitivity", "delta_B", "twirl_quasi_static", "redraw", "t_gate1",       "t_gate2",
      "t_meas"};
  static const std::vector<std::string> output = {"dir"};
  if (section == "run") return run;
  if (section == "noise") return noise;
  if (section == "output") return output;
  throw ConfigError("unknown config section [" + section + "]");
}

void Config::put(const std::string& section, const std::string& key, const std::string& value) {
  const auto& keys = known_keys(section);
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  sections_[section][key] = value;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      known_keys(section);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    c.put(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' needs the form section.key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& dotted, const std::string& value) {
  auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("override key '" + dotted + "' needs the form section.key");
  put(dotted.substr(0, dot), dotted.substr(dot + 1), value);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key);
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  return sections_.at(section).at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

std::string Config::to_text() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, kv] : sections_) {
    if (!first) os << '\n';
    first = false;
    os << '[' << name << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  }
  return os.str();
}

std::vector<LogicalState> parse_states(const std::string& text) {
  std::vector<LogicalState> out;
  for (const auto& tok : split_list(text)) {
    if (tok == "all") {
      for (auto s : all_states()) out.push_back(s);
      continue;
    }
    try {
      out.push_back(parse_state(tok));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("empty state list");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i] == out[j]) throw ConfigError("state " + state_name(out[i]) + " listed twice");
  return out;
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ':', ' ');
    auto parts = split_list(t);
    if (parts.size() != 3) throw ConfigError("time range needs start:stop:count");
    double a = to_double("times", parts[0]), b = to_double("times", parts[1]);
    auto n = to_uint("times", parts[2]);
    if (n < 1) throw ConfigError("time range needs count >= 1");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    for (const auto& tok : split_list(text)) out.push_back(to_double("times", tok));
  }
  if (out.empty()) throw ConfigError("empty time list");
  for (double v : out)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("times must be finite and >= 0");
  return out;
}

std::vector<int> parse_cycles(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ':', ' ');
    auto parts = split_list(t);
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("cycle range needs first:last or first:last:step");
    auto a = to_uint("cycles", parts[0]), b = to_uint("cycles", parts[1]);
    auto step = parts.size() == 3 ? to_uint("cycles", parts[2]) : 1;
    if (step < 1 || b < a) throw ConfigError("bad cycle range");
    for (auto n = a; n <= b; n += step) out.push_back(static_cast<int>(n));
    return out;
  }
  for (const auto& tok : split_list(text)) out.push_back(static_cast<int>(to_uint("cycles", tok)));
  if (out.empty()) throw ConfigError("empty cycle list");
  return out;
}

RunSpec resolve_run(const Config& c) {
  RunSpec spec;
  ExperimentPlan& p = spec.plan;
  try {
    p.kind = parse_qubit_kind(c.get_or("run", "kind", "physical"));
    p.states = parse_states(c.get_or("run", "states", "all"));
    if (p.kind == QubitKind::DfsQec) {
      if (c.has("run", "times")) throw ConfigError("dfs_qec runs take cycles, not times");
      p.cycles = parse_cycles(c.get_or("run", "cycles", "0:4"));
    } else {
      if (c.has("run", "cycles")) throw ConfigError("physical and dfs runs take times, not cycles");
      p.times = parse_times(c.get_or("run", "times", "0:6:13"));
    }
    p.shots = to_uint("shots", c.get_or("run", "shots", "1000"));
    p.mode = parse_decode_mode(c.get_or("run", "mode", "correct"));
    p.seed = to_uint("seed", c.get_or("run", "seed", "1"));
    p.engine = parse_engine_kind(c.get_or("run", "engine", "clifford"));
    const std::string layout = c.get_or("run", "layout", p.engine == EngineKind::StateVector ? "compact" : "full");
    if (layout == "full") p.layout = AncillaLayout::Full;
    else if (layout == "compact") p.layout = AncillaLayout::Compact;
    else throw ConfigError("layout must be full or compact");
    p.workers = static_cast<unsigned>(to_uint("workers", c.get_or("run", "workers", "0")));
    p.zone_batch = static_cast<int>(to_uint("zone_batch", c.get_or("run", "zone_batch", "100")));
    spec.assume_orthogonal = to_bool("assume_orthogonal", c.get_or("run", "assume_orthogonal", "false"));
    spec.out_dir = c.get_or("output", "dir", "out");

    NoiseConfig n = noise_preset(c.get_or("noise", "preset", "ideal"));
    if (c.sections().count("noise"))
      for (const auto& [k, v] : c.sections().at("noise"))
        if (k != "preset") n.set(k, v);
    p.noise = n;
    p.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const CapabilityError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

Config resolved_config(const RunSpec& spec) {
  const ExperimentPlan& p = spec.plan;
  Config c;
  std::string states;
  for (auto s : p.states) states += (states.empty() ? "" : ",") + state_name(s);
  c.set("run.kind", qubit_kind_name(p.kind));
  c.set("run.states", states);
  if (p.kind == QubitKind::DfsQec) {
    std::string cy;
    for (int n : p.cycles) cy += (cy.empty() ? "" : ",") + std::to_string(n);
    c.set("run.cycles", cy);
  } else {
    std::string ts;
    for (double t : p.times) ts += (ts.empty() ? "" : ",") + fmt(t);
    c.set("run.times", ts);
  }
  c.set("run.shots", std::to_string(p.shots));
  c.set("run.mode", decode_mode_name(p.mode));
  c.set("run.seed", std::to_string(p.seed));
  c.set("run.engine", engine_kind_name(p.engine));
  c.set("run.layout", p.layout == AncillaLayout::Full ? "full" : "compact");
  c.set("run.workers", std::to_string(p.workers));
  c.set("run.zone_batch", std::to_string(p.zone_batch));
  c.set("run.assume_orthogonal", spec.assume_orthogonal ? "true" : "false");
  for (const auto& [k, v] : p.noise.to_map()) c.set("noise." + k, v);
  c.set("output.dir", spec.out_dir);
  return c;
}

}  // namespace dfsqec
