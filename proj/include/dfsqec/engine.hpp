#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "dfsqec/pauli.hpp"

namespace dfsqec {

using Rng = std::mt19937_64;

class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EngineKind { Clifford, StateVector };

EngineKind parse_engine_kind(const std::string& s);
const char* engine_kind_name(EngineKind k);

class Engine {
 public:
  virtual ~Engine() = default;
  virtual EngineKind kind() const = 0;
  virtual int num_qubits() const = 0;
  virtual std::unique_ptr<Engine> clone() const = 0;

  virtual void h(int q) = 0;
  virtual void s(int q) = 0;
  virtual void sdg(int q) = 0;
  virtual void cnot(int c, int t) = 0;
  virtual void apply_pauli(const PauliString& p) = 0;
  virtual void rz(int q, double theta) = 0;
  // Projective measurement in the Z basis; returns the outcome bit.
  virtual bool measure_z(int q, Rng& rng) = 0;

  void pauli(int q, char letter);
  // Control in basis pc (its -1 eigenspace triggers), applies pt to the target.
  void controlled_pauli(char pc, int c, char pt, int t);
  bool measure(char basis, int q, Rng& rng);
  void reset(int q, Rng& rng);

  // Change of basis mapping `letter` to Z (forward) and its inverse.
  void to_z_basis(char letter, int q);
  void from_z_basis(char letter, int q);
};

// Aaronson-Gottesman stabilizer tableau, one machine word per row.
class TableauEngine : public Engine {
 public:
  explicit TableauEngine(int n);
  EngineKind kind() const override { return EngineKind::Clifford; }
  int num_qubits() const override { return n_; }
  std::unique_ptr<Engine> clone() const override { return std::make_unique<TableauEngine>(*this); }

  void h(int q) override;
  void s(int q) override;
  void sdg(int q) override;
  void cnot(int c, int t) override;
  void apply_pauli(const PauliString& p) override;
  // Only multiples of pi/2 are accepted.
  void rz(int q, double theta) override;
  bool measure_z(int q, Rng& rng) override;

  // +1 or -1 when p has a definite value in the current state, 0 when random.
  int expectation(const PauliString& p) const;
  std::vector<PauliString> stabilizers() const;

 private:
  void rowmult(int target, int source);
  int n_;
  std::vector<std::uint64_t> xs_;
  std::vector<std::uint64_t> zs_;
  std::vector<std::uint8_t> r_;
};

class StateVectorEngine : public Engine {
 public:
  static constexpr int kDefaultCap = 22;
  explicit StateVectorEngine(int n, int cap = kDefaultCap);
  EngineKind kind() const override { return EngineKind::StateVector; }
  int num_qubits() const override { return n_; }
  std::unique_ptr<Engine> clone() const override { return std::make_unique<StateVectorEngine>(*this); }

  void h(int q) override;
  void s(int q) override;
  void sdg(int q) override;
  void cnot(int c, int t) override;
  void apply_pauli(const PauliString& p) override;
  void rz(int q, double theta) override;
  bool measure_z(int q, Rng& rng) override;

  double probability_one(int q) const;
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
  std::complex<double> inner_product(const StateVectorEngine& other) const;
  double fidelity(const StateVectorEngine& other) const;
  double expectation(const PauliString& p) const;

 private:
  void check(int q) const;
  int n_;
  std::vector<std::complex<double>> amp_;
};

std::unique_ptr<Engine> make_engine(EngineKind kind, int n);

// Unsigned Pauli frame: conjugation rules used for fault propagation.
struct Frame {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  void h(int q);
  void s(int q);
  void controlled_pauli(char pc, int c, char pt, int t);
  void multiply(const PauliString& p) {
    x ^= p.x();
    z ^= p.z();
  }
  void clear(int q) {
    x &= ~(std::uint64_t{1} << q);
    z &= ~(std::uint64_t{1} << q);
  }
  // anticommutation of the frame component on q with the given basis letter
  bool flips(char basis, int q) const;
  PauliString restricted(int n) const;
};

}  // namespace dfsqec
