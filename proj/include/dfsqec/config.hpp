#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfsqec/experiments.hpp"

namespace dfsqec {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sectioned key=value text:
//   [run]   kind, states, times, cycles, shots, mode, seed, engine, layout, workers, zone_batch, assume_orthogonal
//   [noise] preset and every NoiseConfig field
//   [output] dir
// '#' and ';' start comments. Unknown sections or keys are rejected.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  // "section.key=value" or "section.key", "value"
  void set(const std::string& assignment);
  void set(const std::string& dotted_key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }
  std::string to_text() const;

  static const std::vector<std::string>& known_keys(const std::string& section);

 private:
  void put(const std::string& section, const std::string& key, const std::string& value);
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct RunSpec {
  ExperimentPlan plan;
  bool assume_orthogonal = false;
  std::string out_dir = "out";
};

RunSpec resolve_run(const Config& config);
// Fully resolved configuration that reproduces `spec` when parsed again.
Config resolved_config(const RunSpec& spec);

std::vector<LogicalState> parse_states(const std::string& text);
// "0,0.5,1" or "start:stop:count" (inclusive, evenly spaced)
std::vector<double> parse_times(const std::string& text);
// "0,2,4" or "first:last" (inclusive) or "first:last:step"
std::vector<int> parse_cycles(const std::string& text);

}  // namespace dfsqec
