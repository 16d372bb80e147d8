#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfsqec/decoder.hpp"
#include "dfsqec/engine.hpp"
#include "dfsqec/noise.hpp"
#include "dfsqec/protocol.hpp"

namespace dfsqec {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QubitKind { Physical, Dfs, DfsQec };
QubitKind parse_qubit_kind(const std::string& s);
const char* qubit_kind_name(QubitKind k);

struct ExperimentPlan {
  QubitKind kind = QubitKind::Physical;
  std::vector<LogicalState> states;
  std::vector<double> times;     // seconds (physical, dfs)
  std::vector<int> cycles;       // cycle counts (dfs_qec)
  std::uint64_t shots = 1000;
  DecodeMode mode = DecodeMode::Correct;
  NoiseConfig noise;
  std::uint64_t seed = 1;
  EngineKind engine = EngineKind::Clifford;
  AncillaLayout layout = AncillaLayout::Full;
  unsigned workers = 0;          // 0 = available parallelism
  int zone_batch = 100;          // shots sharing one quasi-static draw under per-batch redraw

  std::size_t num_points() const;
  // wall-clock time of point i (n * tau for dfs_qec)
  double time_of(std::size_t i) const;
  int cycles_of(std::size_t i) const;
  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval at z standard deviations.
Interval wilson_interval(std::uint64_t successes, std::uint64_t total, double z = 1.959963984540054);

struct PointCounts {
  std::uint64_t total = 0;
  std::uint64_t survivors = 0;           // correct-mode stream
  std::uint64_t accepted = 0;            // shots with no rejected cycle
  std::uint64_t accepted_survivors = 0;
  std::uint64_t ambiguous_cycles = 0;
  std::uint64_t hook_corrections = 0;
  std::uint64_t leak_events = 0;

  PointCounts& operator+=(const PointCounts& o);
};

struct MemoryPoint {
  LogicalState state = LogicalState::Zero;
  double time = 0.0;
  int cycles = 0;
  PointCounts counts;

  std::uint64_t survivors(DecodeMode m) const;
  std::uint64_t denominator(DecodeMode m) const;
  std::uint64_t failures(DecodeMode m) const;
  std::uint64_t rejected(DecodeMode m) const;
  double p(DecodeMode m) const;
  Interval ci(DecodeMode m) const;
};

struct MemoryResult {
  ExperimentPlan plan;
  std::vector<MemoryPoint> points;  // state-major, then time
  double se_duration = 0.0;         // dfs_qec only
  double idle_per_cycle = 0.0;
  double seconds = 0.0;

  const MemoryPoint* find(LogicalState s, std::size_t time_index) const;
};

MemoryResult run_memory(const ExperimentPlan& plan);

// One shot at one point; exposed for tests and coherent cross-checks.
struct ShotOutcome {
  bool survived = false;
  bool accepted = true;
  int ambiguous_cycles = 0;
  int hook_corrections = 0;
  int leak_events = 0;
};
ShotOutcome run_memory_shot(const ExperimentPlan& plan, const QecProtocol* protocol, LogicalState state,
                            std::size_t point, std::uint64_t shot);

struct MetricRow {
  double time = 0.0;
  int cycles = 0;
  double F_a = 0.0;
  double F_p = 0.0;
  double p_worst = 0.0;
  double R = 0.0;
  double sigma_F_p = 0.0;
  double sigma_p_worst = 0.0;
  std::vector<LogicalState> assumed;  // states whose p was copied from the orthogonal partner
};

// p per state for one time slice; entries may be missing.
MetricRow metrics_from_probabilities(const std::map<LogicalState, double>& p, bool assume_orthogonal,
                                     const std::map<LogicalState, double>* sigma = nullptr);
std::vector<MetricRow> compute_metrics(const MemoryResult& result, bool assume_orthogonal = false);

struct RetentionRow {
  double time = 0.0;
  int cycles = 0;
  std::uint64_t accepted = 0;
  std::uint64_t total = 0;
  double fraction = 1.0;
  Interval ci;
  double per_cycle = 1.0;  // fraction^(1/n)
};
std::vector<RetentionRow> retention(const MemoryResult& result);

std::string results_csv(const MemoryResult& result);
// Summary with metrics per time and the series needed by the fitter.
std::string results_json(const MemoryResult& result, bool assume_orthogonal);

}  // namespace dfsqec
