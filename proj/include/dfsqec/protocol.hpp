#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "dfsqec/circuit.hpp"
#include "dfsqec/codes.hpp"
#include "dfsqec/decoder.hpp"
#include "dfsqec/executor.hpp"

namespace dfsqec {

enum class LogicalState { Zero, One, Plus, Minus, PlusI, MinusI };

LogicalState parse_state(const std::string& s);
std::string state_name(LogicalState s);
char state_basis(LogicalState s);          // 'Z', 'X' or 'Y'
bool state_is_negative(LogicalState s);    // -1 eigenstate of its basis operator
LogicalState orthogonal_state(LogicalState s);
const std::array<LogicalState, 6>& all_states();

// Prepares the stabilizer state of `generators` (signed, independent, commuting, one per qubit)
// on qubits 0..k-1 of an n_total-qubit circuit.
Circuit synthesize_state_prep(const std::vector<PauliString>& generators, int n_total);

enum class AncillaLayout { Full, Compact };

struct ProtocolOptions {
  bool flags = true;
  AncillaLayout layout = AncillaLayout::Full;
};

struct SeLayout {
  int n_qubits = 0;
  std::array<int, 5> dfs_anc{};
  std::array<std::array<int, 2>, 2> round_anc{};
  std::array<std::array<int, 2>, 2> round_flag{};
  std::array<int, 5> unflagged_r_anc{};
  std::array<int, 4> unflagged_s_anc{};
};

SeLayout make_layout(AncillaLayout layout);

struct SeCircuits {
  SeLayout layout;
  bool flags = true;
  Circuit dfs_se;                      // register dfs (raw bits, 1 = no error)
  std::array<Circuit, 2> flagged;      // registers f1s/f1f and f2s/f2f
  Circuit unflagged;                   // registers ur (raw) and us
  std::array<Circuit, 4> unflagged_s;  // one ladder per s_j, register us
};

SeCircuits synthesize_se_circuits(const CodeSpec& code, const ProtocolOptions& opt = {});

// Full adaptive cycle: idle, leakage detection, DFS SE, flagged rounds, conditional unflagged SE.
Circuit build_qec_cycle_circuit(const SeCircuits& se, double idle_duration);

struct HookTableBuild {
  std::shared_ptr<HookTable> table;
  std::size_t faults_enumerated = 0;
  std::size_t flagged_faults = 0;
  std::size_t unflagged_high_weight = 0;  // unflagged faults leaving reduced weight > 1
  std::size_t conflicts = 0;
  std::array<std::size_t, 2> entries_per_round{};
};

HookTableBuild build_hook_table(const SeCircuits& se, const CodeSpec& code);

class QecProtocol {
 public:
  explicit QecProtocol(ProtocolOptions opt = {});

  const ProtocolOptions& options() const { return opt_; }
  const CodeSpec& code() const { return code_; }
  const SeCircuits& se() const { return se_; }
  const HookTableBuild& hook_build() const { return hooks_; }
  const Decoder& decoder() const { return *decoder_; }
  int num_qubits() const { return se_.layout.n_qubits; }
  double se_duration(const NoiseConfig& cfg) const;

  const Circuit& cycle_circuit(double idle_duration) const;
  Circuit init_circuit(LogicalState s) const;
  Circuit readout_circuit(char basis) const;
  const PauliString& logical(char basis) const;
  // Parity of the readout register over the logical support: 0 = +1 eigenvalue.
  int readout_parity(const Circuit& readout, const ShotRecord& rec, char basis) const;

  SyndromeRecord record_from(const Circuit& cycle, const ShotRecord& rec) const;

  struct CycleResult {
    SyndromeRecord record;
    DecodeOutcome outcome;     // correct-mode decision, applied to the state
    DecodeOutcome postselect;  // post-select verdict on the same record
  };
  CycleResult qec_cycle(Machine& m, const Circuit& cycle, const ShotNoise* noise, Rng& noise_rng, Rng& tie_rng,
                        std::span<const FaultLocation> faults = {}) const;

  // Noiseless codeword on a Clifford machine with frame tracking.
  Machine prepared_codeword(LogicalState s) const;

 private:
  ProtocolOptions opt_;
  CodeSpec code_;
  SeCircuits se_;
  HookTableBuild hooks_;
  std::unique_ptr<Decoder> decoder_;
  mutable std::mutex cycles_mutex_;
  mutable std::vector<std::pair<double, std::shared_ptr<Circuit>>> cycles_;
  std::array<Circuit, 3> base_init_;
};

struct FaultScanOptions {
  double idle_duration = 1.0;
  std::size_t two_fault_samples = 0;
  std::uint64_t seed = 1;
  std::size_t max_reported = 20;
};

struct FaultScanReport {
  std::size_t locations = 0;
  std::size_t active_locations = 0;  // locations whose instruction executes in the clean run
  std::size_t violations = 0;
  std::size_t logical_failures = 0;
  bool condition_a = true;
  bool condition_b = true;
  std::size_t hook_conflicts = 0;
  std::size_t hook_entries = 0;
  std::size_t two_fault_runs = 0;
  std::size_t two_fault_failures = 0;
  double seconds = 0.0;
  std::vector<std::string> details;
  bool ok() const { return violations == 0 && condition_a && condition_b && hook_conflicts == 0; }
};

FaultScanReport fault_scan(const QecProtocol& protocol, const FaultScanOptions& opt = {});

}  // namespace dfsqec
