#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dfsqec {

enum class Op : std::uint8_t {
  H,
  S,
  Sdg,
  X,
  Y,
  Z,
  CP,  // controlled Pauli; CNOT = C(Z,X), CZ = C(Z,Z)
  RZ,
  Prep,
  Reset,
  Measure,
  LeakDetect,
  Idle,
  Barrier,
  If,
};

struct BitRef {
  int reg = -1;
  int bit = 0;
};

// Either all terms equal their values, or any term differs from its value.
struct Predicate {
  enum class Kind : std::uint8_t { AllEqual, AnyDiffers };
  Kind kind = Kind::AllEqual;
  std::vector<std::pair<int, std::uint64_t>> terms;

  bool eval(const std::vector<std::uint64_t>& regs) const;
};

struct Instruction {
  Op op = Op::H;
  std::vector<int> qubits;
  char pc = 'Z';  // control basis (CP) or measurement basis (Measure)
  char pt = 'X';  // target Pauli (CP)
  double param = 0.0;  // RZ angle or idle duration
  BitRef target;
  Predicate pred;
  std::vector<Instruction> body;

  bool is_two_qubit() const { return op == Op::CP; }
  bool is_one_qubit_gate() const {
    return op == Op::H || op == Op::S || op == Op::Sdg || op == Op::X || op == Op::Y || op == Op::Z || op == Op::RZ;
  }
};

struct Register {
  std::string name;
  int size = 0;
};

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Circuit {
 public:
  explicit Circuit(int n_qubits = 0) : n_qubits_(n_qubits) {}
  Circuit(const Circuit& o);
  Circuit& operator=(const Circuit& o);
  Circuit(Circuit&&) = default;
  Circuit& operator=(Circuit&&) = default;

  int num_qubits() const { return n_qubits_; }
  const std::vector<Instruction>& instructions() const { return top_; }
  const std::vector<Register>& registers() const { return regs_; }

  int add_register(const std::string& name, int size);
  int register_index(const std::string& name) const;  // -1 when absent
  int require_register(const std::string& name) const;

  Circuit& h(int q) { return one(Op::H, q); }
  Circuit& s(int q) { return one(Op::S, q); }
  Circuit& sdg(int q) { return one(Op::Sdg, q); }
  Circuit& x(int q) { return one(Op::X, q); }
  Circuit& y(int q) { return one(Op::Y, q); }
  Circuit& z(int q) { return one(Op::Z, q); }
  Circuit& pauli(char letter, int q);
  Circuit& cp(char pc, int c, char pt, int t);
  Circuit& cnot(int c, int t) { return cp('Z', c, 'X', t); }
  Circuit& cz(int c, int t) { return cp('Z', c, 'Z', t); }
  Circuit& rz(int q, double theta);
  Circuit& prep(int q) { return one(Op::Prep, q); }
  Circuit& reset(int q) { return one(Op::Reset, q); }
  Circuit& measure(char basis, int q, const std::string& reg, int bit);
  Circuit& leak_detect(int q, const std::string& reg, int bit);
  Circuit& idle(std::vector<int> qubits, double duration);
  Circuit& barrier(std::vector<int> qubits);
  Circuit& begin_if(Predicate pred);
  Circuit& end_if();
  // term helpers for predicates built from register names
  std::pair<int, std::uint64_t> term(const std::string& reg, std::uint64_t value) const;

  // Appends all instructions of `other`; registers are matched by name and created when missing.
  Circuit& append(const Circuit& other);

  std::size_t instruction_count() const;  // pre-order count including block bodies
  void validate() const;

  std::string to_text() const;
  static Circuit parse(const std::string& text);

 private:
  Circuit& one(Op op, int q);
  Instruction& push(Instruction ins);
  std::vector<Instruction>& sink();
  void check_qubit(int q) const;

  int n_qubits_;
  std::vector<Register> regs_;
  std::vector<Instruction> top_;
  std::vector<std::vector<Instruction>*> open_;
};

std::size_t count_instructions(const std::vector<Instruction>& block);

// Register values are written with bit i of the register at bit i of the word;
// text forms list bit 0 first.
std::string bits_to_string(std::uint64_t v, int size);
std::uint64_t bits_from_string(const std::string& s);

}  // namespace dfsqec
