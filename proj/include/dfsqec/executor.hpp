#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfsqec/circuit.hpp"
#include "dfsqec/engine.hpp"
#include "dfsqec/noise.hpp"

namespace dfsqec {

struct FaultLocation {
  enum class Kind : std::uint8_t { Pauli, MeasureFlip };
  std::size_t instruction = 0;  // pre-order index
  Kind kind = Kind::Pauli;
  PauliString pauli;            // on the full register, support within the instruction's qubits

  std::string describe() const;
};

struct ShotRecord {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> registers;
  std::vector<std::uint8_t> written;
  std::vector<std::uint8_t> leaked;
  std::optional<Frame> frame;  // residual relative to the ideal run when tracking is on

  std::uint64_t value(const Circuit& c, const std::string& reg) const { return registers[c.require_register(reg)]; }
  bool was_written(const Circuit& c, const std::string& reg) const { return written[c.require_register(reg)] != 0; }
};

// Quantum state plus the classical side information that lives with it.
struct Machine {
  std::unique_ptr<Engine> engine;
  std::vector<std::uint8_t> leaked;
  bool track_frame = false;
  Frame frame;

  Machine() = default;
  Machine(EngineKind kind, int n, bool track = false);
  Machine(const Machine& o);
  Machine& operator=(const Machine& o);
  Machine(Machine&&) = default;
  Machine& operator=(Machine&&) = default;

  int num_qubits() const { return engine->num_qubits(); }
  // Pauli applied to the state and to the frame (used for injected errors).
  void inject(const PauliString& p);
  // Pauli applied to the state only (used for corrections, which the ideal run also receives).
  void correct(const PauliString& p) { engine->apply_pauli(p.embed(num_qubits())); }
};

struct ExecOptions {
  const ShotNoise* noise = nullptr;
  std::span<const FaultLocation> faults;
};

// Runs `circuit` on `m`, writing classical results into `rec` (registers are reset first).
void execute(const Circuit& circuit, Machine& m, ShotRecord& rec, Rng& rng, const ExecOptions& opt = {});

ShotRecord run(const Circuit& circuit, EngineKind engine, const NoiseConfig& noise, std::uint64_t seed);

std::vector<FaultLocation> enumerate_fault_locations(const Circuit& circuit);

// Clifford engine, no stochastic noise; returns the record with the residual frame.
ShotRecord run_with_fault(const Circuit& circuit, const FaultLocation& fault, std::uint64_t seed = 0);

std::string shot_csv_header(const Circuit& circuit);
std::string shot_csv_row(const Circuit& circuit, const ShotRecord& rec);

}  // namespace dfsqec
