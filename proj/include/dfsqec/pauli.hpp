#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dfsqec {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Signed Pauli string on up to 64 qubits in symplectic form.
// The operator is i^phase * prod_q P_q with P_q in {I, X, Y, Z} (Y Hermitian).
class PauliString {
 public:
  static constexpr int kMaxQubits = 64;

  PauliString() = default;
  explicit PauliString(int n);
  PauliString(int n, std::uint64_t x, std::uint64_t z, int phase = 0);

  static PauliString single(int n, int qubit, char letter);
  static PauliString parse(std::string_view text, int n);

  int n() const { return n_; }
  std::uint64_t x() const { return x_; }
  std::uint64_t z() const { return z_; }
  int phase() const { return phase_; }

  // +1 or -1; throws when the phase is imaginary
  int sign() const;
  bool hermitian() const { return (phase_ & 1) == 0; }

  char letter(int qubit) const;
  void set(int qubit, char letter);
  int weight() const;
  bool is_identity() const { return x_ == 0 && z_ == 0; }

  PauliString& negate();
  PauliString& operator*=(const PauliString& other);
  PauliString embed(int n) const;
  PauliString unsigned_copy() const { return PauliString(n_, x_, z_, 0); }

  // "I" for the identity, "-" prefix for a negative sign
  std::string str() const;

  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && phase_ == o.phase_;
  }
  bool operator!=(const PauliString& o) const { return !(*this == o); }
  bool same_support_letters(const PauliString& o) const { return n_ == o.n_ && x_ == o.x_ && z_ == o.z_; }

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int phase_ = 0;
};

PauliString multiply(const PauliString& p, const PauliString& q);
inline PauliString operator*(PauliString p, const PauliString& q) { return p *= q; }

// 0 when p and q commute, 1 when they anticommute
int symplectic_product(const PauliString& p, const PauliString& q);
inline bool commutes(const PauliString& p, const PauliString& q) { return symplectic_product(p, q) == 0; }

inline int parity64(std::uint64_t v) { return __builtin_parityll(v); }
inline int popcount64(std::uint64_t v) { return __builtin_popcountll(v); }

class SyndromeVector {
 public:
  SyndromeVector() = default;
  SyndromeVector(int size, std::uint64_t bits) : size_(size), bits_(bits) {}
  static SyndromeVector from_string(std::string_view bits);

  int size() const { return size_; }
  std::uint64_t bits() const { return bits_; }
  bool operator[](int i) const { return (bits_ >> i) & 1u; }
  bool is_zero() const { return bits_ == 0; }
  std::string str() const;
  bool operator==(const SyndromeVector& o) const { return size_ == o.size_ && bits_ == o.bits_; }

 private:
  int size_ = 0;
  std::uint64_t bits_ = 0;
};

SyndromeVector syndrome_of(const PauliString& error, const std::vector<PauliString>& generators);

enum class PauliClass { Any, ZOnly, XOnly };

struct CodeSpec;

class ExhaustionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All minimum-weight Paulis of the given class whose syndrome against the
// code's generators equals `syndrome`.
std::vector<PauliString> brute_force_min_weight(const SyndromeVector& syndrome, const CodeSpec& code,
                                                PauliClass cls = PauliClass::Any);

// Calls f(pauli) for every unsigned Pauli of exactly weight w in the class.
template <typename F>
void for_each_pauli_of_weight(int n, int w, PauliClass cls, F&& f);

}  // namespace dfsqec

#include "dfsqec/pauli_enum.inl"
