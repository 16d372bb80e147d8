#include "dfsqec/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dfsqec {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value '" + v + "' for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("bad boolean value '" + v + "' for " + key);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_prob(const char* name, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

void check_rate(const char* name, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument(std::string(name) + " must be a finite value >= 0");
}

}  // namespace

double NoiseConfig::effective_Gamma() const {
  if (delta_B >= 0.0) return 2.0 * std::numbers::pi * field_sensitivity * delta_B;
  return Gamma_quasi;
}

bool NoiseConfig::is_noiseless() const {
  return gamma_fast == 0 && effective_Gamma() == 0 && p1 == 0 && p2 == 0 && p_meas == 0 && p_spam_extra == 0 &&
         p_leak == 0;
}

void NoiseConfig::validate() const {
  check_rate("gamma_fast", gamma_fast);
  check_rate("Gamma_quasi", Gamma_quasi);
  check_prob("differential_fraction", differential_fraction);
  check_prob("p1", p1);
  check_prob("p2", p2);
  check_prob("p_meas", p_meas);
  check_prob("p_spam_extra", p_spam_extra);
  check_prob("p_leak", p_leak);
  check_rate("tau_cycle", tau_cycle);
  check_rate("field_sensitivity", field_sensitivity);
  check_rate("t_gate1", t_gate1);
  check_rate("t_gate2", t_gate2);
  check_rate("t_meas", t_meas);
  if (zone_count < 1) throw std::invalid_argument("zone_count must be >= 1");
}

void NoiseConfig::set(const std::string& key, const std::string& value) {
  if (key == "preset") {
    *this = noise_preset(value);
  } else if (key == "gamma_fast") {
    gamma_fast = parse_double(key, value);
  } else if (key == "Gamma_quasi") {
    Gamma_quasi = parse_double(key, value);
  } else if (key == "zone_count") {
    zone_count = static_cast<int>(parse_double(key, value));
  } else if (key == "pair_colocated") {
    pair_colocated = parse_bool(key, value);
  } else if (key == "differential_fraction") {
    differential_fraction = parse_double(key, value);
  } else if (key == "p1") {
    p1 = parse_double(key, value);
  } else if (key == "p2") {
    p2 = parse_double(key, value);
  } else if (key == "p_meas") {
    p_meas = parse_double(key, value);
  } else if (key == "p_spam_extra") {
    p_spam_extra = parse_double(key, value);
  } else if (key == "p_leak") {
    p_leak = parse_double(key, value);
  } else if (key == "tau_cycle") {
    tau_cycle = parse_double(key, value);
  } else if (key == "field_sensitivity") {
    field_sensitivity = parse_double(key, value);
  } else if (key == "delta_B") {
    delta_B = parse_double(key, value);
  } else if (key == "twirl_quasi_static") {
    twirl_quasi_static = parse_bool(key, value);
  } else if (key == "redraw") {
    if (value == "per-shot") redraw = RedrawPolicy::PerShot;
    else if (value == "per-batch") redraw = RedrawPolicy::PerBatch;
    else throw std::invalid_argument("redraw must be per-shot or per-batch");
  } else if (key == "t_gate1") {
    t_gate1 = parse_double(key, value);
  } else if (key == "t_gate2") {
    t_gate2 = parse_double(key, value);
  } else if (key == "t_meas") {
    t_meas = parse_double(key, value);
  } else {
    throw std::invalid_argument("unknown noise key '" + key + "'");
  }
}

std::map<std::string, std::string> NoiseConfig::to_map() const {
  return {{"gamma_fast", fmt(gamma_fast)},
          {"Gamma_quasi", fmt(Gamma_quasi)},
          {"zone_count", std::to_string(zone_count)},
          {"pair_colocated", pair_colocated ? "true" : "false"},
          {"differential_fraction", fmt(differential_fraction)},
          {"p1", fmt(p1)},
          {"p2", fmt(p2)},
          {"p_meas", fmt(p_meas)},
          {"p_spam_extra", fmt(p_spam_extra)},
          {"p_leak", fmt(p_leak)},
          {"tau_cycle", fmt(tau_cycle)},
          {"field_sensitivity", fmt(field_sensitivity)},
          {"delta_B", fmt(delta_B)},
          {"twirl_quasi_static", twirl_quasi_static ? "true" : "false"},
          {"redraw", redraw == RedrawPolicy::PerShot ? "per-shot" : "per-batch"},
          {"t_gate1", fmt(t_gate1)},
          {"t_gate2", fmt(t_gate2)},
          {"t_meas", fmt(t_meas)}};
}

NoiseConfig noise_preset(const std::string& name) {
  NoiseConfig c;
  if (name == "ideal") return c;
  if (name == "dephasing-only" || name == "h1-like") {
    c.Gamma_quasi = 0.7071;
    c.differential_fraction = 0.065;
    c.pair_colocated = true;
    if (name == "h1-like") {
      c.p1 = 1e-4;
      c.p2 = 5e-3;
      c.p_meas = 1e-3;
      c.p_spam_extra = 5e-4;
    }
    return c;
  }
  throw std::invalid_argument("unknown noise preset '" + name + "'");
}

std::vector<std::string> noise_preset_names() { return {"ideal", "dephasing-only", "h1-like"}; }

ZoneAssignment ZoneAssignment::standard(int n_qubits, int n_data, const NoiseConfig& cfg, bool encoded_pairs) {
  ZoneAssignment z;
  z.zone_.assign(n_qubits, 0);
  z.partner_.assign(n_qubits, -1);
  z.colocated_ = cfg.pair_colocated;
  z.encoded_ = encoded_pairs;
  z.redraw = cfg.redraw;
  const int pairs = n_data / 2;
  for (int q = 0; q + 1 < n_data; q += 2) {
    z.partner_[q] = q + 1;
    z.partner_[q + 1] = q;
  }
  if (cfg.pair_colocated) {
    int used = std::min(cfg.zone_count, std::max(pairs, 1));
    for (int q = 0; q < 2 * pairs; ++q) z.zone_[q] = (q / 2) % cfg.zone_count;
    int next = used;
    for (int q = 2 * pairs; q < n_qubits; ++q) z.zone_[q] = next++;
    z.num_zones_ = next;
  } else {
    for (int q = 0; q < n_qubits; ++q) z.zone_[q] = q;
    z.num_zones_ = n_qubits;
  }
  return z;
}

QuasiStaticSample sample_quasi_static(const NoiseConfig& cfg, const ZoneAssignment& zones, Rng& rng) {
  QuasiStaticSample s;
  const double G = cfg.effective_Gamma();
  const int n = zones.num_qubits();
  s.zone_offsets.assign(zones.num_zones(), 0.0);
  s.pair_offsets.assign((n + 1) / 2, 0.0);
  s.qubit_offsets.assign(n, 0.0);
  if (G > 0) {
    std::normal_distribution<double> normal(0.0, G);
    for (auto& v : s.zone_offsets) v = normal(rng);
    if (zones.colocated()) {
      for (auto& v : s.pair_offsets) v = normal(rng);
    }
  }
  const double f = cfg.differential_fraction;
  const double common = std::sqrt(std::max(0.0, 1.0 - f * f));
  for (int q = 0; q < n; ++q) {
    double zo = s.zone_offsets[zones.zone(q)];
    if (zones.colocated() && zones.partner(q) >= 0) {
      double w = s.pair_offsets[q / 2];
      s.qubit_offsets[q] = common * zo + ((q % 2 == 0) ? f * w : -f * w);
    } else {
      s.qubit_offsets[q] = zo;
    }
  }
  return s;
}

ShotNoise::ShotNoise(const NoiseConfig& cfg, const ZoneAssignment& zones, QuasiStaticSample sample)
    : cfg_(cfg), zones_(zones), sample_(std::move(sample)) {}

double ShotNoise::idle_z_probability(double duration) const {
  if (cfg_.gamma_fast <= 0 || duration <= 0) return 0.0;
  return 0.5 * (1.0 - std::exp(-cfg_.gamma_fast * duration));
}

bool ShotNoise::bernoulli(double p, Rng& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

char ShotNoise::sample_depolarize1(Rng& rng) const {
  if (!bernoulli(cfg_.p1, rng)) return 'I';
  return "XYZ"[std::uniform_int_distribution<int>(0, 2)(rng)];
}

std::pair<char, char> ShotNoise::sample_depolarize2(Rng& rng) const {
  if (!bernoulli(cfg_.p2, rng)) return {'I', 'I'};
  int k = std::uniform_int_distribution<int>(1, 15)(rng);
  return {"IXYZ"[k / 4], "IXYZ"[k % 4]};
}

bool ShotNoise::sample_prep_flip(Rng& rng) const { return bernoulli(cfg_.p_spam_extra, rng); }
bool ShotNoise::sample_meas_flip(Rng& rng) const { return bernoulli(cfg_.p_meas, rng); }
bool ShotNoise::sample_leak(Rng& rng) const { return bernoulli(cfg_.p_leak, rng); }

}  // namespace dfsqec
