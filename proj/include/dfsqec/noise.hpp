#pragma once

#include <map>
#include <string>
#include <vector>

#include "dfsqec/engine.hpp"

namespace dfsqec {

enum class RedrawPolicy { PerShot, PerBatch };

struct NoiseConfig {
  double gamma_fast = 0.0;       // 1/s
  double Gamma_quasi = 0.0;      // rad/s
  int zone_count = 5;
  bool pair_colocated = true;
  double differential_fraction = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p_meas = 0.0;
  double p_spam_extra = 0.0;
  double p_leak = 0.0;
  double tau_cycle = 2.89;       // s
  double field_sensitivity = 2032.0;  // Hz/G
  double delta_B = -1.0;         // G; negative means unset
  bool twirl_quasi_static = true;  // Pauli-twirled quasi-static channel on the Clifford engine
  RedrawPolicy redraw = RedrawPolicy::PerShot;
  double t_gate1 = 1e-5;         // s
  double t_gate2 = 2e-4;         // s
  double t_meas = 2e-4;          // s

  // Gamma_quasi, or 2 pi * field_sensitivity * delta_B when delta_B is set
  double effective_Gamma() const;
  bool is_noiseless() const;
  void validate() const;
  // Applies one key=value override; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
};

NoiseConfig noise_preset(const std::string& name);
std::vector<std::string> noise_preset_names();

class ZoneAssignment {
 public:
  // Data qubits 0..n_data-1 are grouped in pairs (2i, 2i+1); further qubits get private zones.
  static ZoneAssignment standard(int n_qubits, int n_data, const NoiseConfig& cfg, bool encoded_pairs);

  int num_qubits() const { return static_cast<int>(zone_.size()); }
  int num_zones() const { return num_zones_; }
  int zone(int q) const { return zone_[q]; }
  int partner(int q) const { return partner_[q]; }
  bool colocated() const { return colocated_; }
  // Partners form DFS-encoded pairs (affects the twirled channel).
  bool encoded_pairs() const { return encoded_; }
  RedrawPolicy redraw = RedrawPolicy::PerShot;

 private:
  std::vector<int> zone_;
  std::vector<int> partner_;
  int num_zones_ = 0;
  bool colocated_ = true;
  bool encoded_ = false;
};

struct QuasiStaticSample {
  std::vector<double> zone_offsets;   // common part per zone, rad/s
  std::vector<double> pair_offsets;   // differential draw per qubit pair index
  std::vector<double> qubit_offsets;  // resulting per-qubit offset, rad/s
};

QuasiStaticSample sample_quasi_static(const NoiseConfig& cfg, const ZoneAssignment& zones, Rng& rng);

// Per-shot view of the noise: the config plus sampled quasi-static offsets.
class ShotNoise {
 public:
  ShotNoise(const NoiseConfig& cfg, const ZoneAssignment& zones, QuasiStaticSample sample);

  const NoiseConfig& config() const { return cfg_; }
  const ZoneAssignment& zones() const { return zones_; }
  double offset(int q) const { return sample_.qubit_offsets[q]; }
  double idle_angle(int q, double duration) const { return offset(q) * duration; }
  // probability of a stochastic Z in an idle of the given duration
  double idle_z_probability(double duration) const;

  // 'I', 'X', 'Y' or 'Z'
  char sample_depolarize1(Rng& rng) const;
  std::pair<char, char> sample_depolarize2(Rng& rng) const;
  bool sample_prep_flip(Rng& rng) const;
  bool sample_meas_flip(Rng& rng) const;
  bool sample_leak(Rng& rng) const;
  static bool bernoulli(double p, Rng& rng);

 private:
  NoiseConfig cfg_;
  ZoneAssignment zones_;
  QuasiStaticSample sample_;
};

}  // namespace dfsqec
