#include "dfsqec/pauli.hpp"

#include <cctype>

#include "dfsqec/codes.hpp"

namespace dfsqec {

namespace {

void check_qubit(int n, int q) {
  if (q < 0 || q >= n) throw DimensionError("qubit index " + std::to_string(q) + " out of range for n=" + std::to_string(n));
}

std::uint64_t mask_for(int n) { return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1); }

}  // namespace

PauliString::PauliString(int n) : n_(n) {
  if (n < 0 || n > kMaxQubits) throw DimensionError("qubit count " + std::to_string(n) + " unsupported");
}

PauliString::PauliString(int n, std::uint64_t x, std::uint64_t z, int phase) : PauliString(n) {
  if ((x | z) & ~mask_for(n)) throw DimensionError("Pauli bits beyond qubit count");
  x_ = x;
  z_ = z;
  phase_ = phase & 3;
}

PauliString PauliString::single(int n, int qubit, char letter) {
  PauliString p(n);
  p.set(qubit, letter);
  return p;
}

PauliString PauliString::parse(std::string_view text, int n) {
  PauliString p(n);
  std::size_t i = 0;
  auto fail = [&](const std::string& why) { throw ParseError("bad Pauli '" + std::string(text) + "': " + why); };
  if (text == "I" || text == "+I") return p;
  if (text == "-I") return p.negate();
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    if (text[i] == '-') p.phase_ = 2;
    ++i;
  }
  if (i >= text.size()) fail("empty");
  int last = -1;
  while (i < text.size()) {
    char c = text[i++];
    if (c != 'X' && c != 'Y' && c != 'Z') fail("expected X, Y or Z");
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) fail("missing index");
    int q = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      q = q * 10 + (text[i++] - '0');
      if (q > 1000) fail("index too large");
    }
    if (q <= last) fail("indices must be strictly increasing");
    if (q >= n) throw DimensionError("Pauli '" + std::string(text) + "' exceeds qubit count " + std::to_string(n));
    last = q;
    p.set(q, c);
  }
  return p;
}

int PauliString::sign() const {
  if (!hermitian()) throw std::logic_error("Pauli has imaginary phase");
  return phase_ == 0 ? 1 : -1;
}

char PauliString::letter(int qubit) const {
  check_qubit(n_, qubit);
  bool xb = (x_ >> qubit) & 1u, zb = (z_ >> qubit) & 1u;
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

void PauliString::set(int qubit, char letter) {
  check_qubit(n_, qubit);
  std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  switch (letter) {
    case 'I': break;
    case 'X': x_ |= bit; break;
    case 'Y': x_ |= bit; z_ |= bit; break;
    case 'Z': z_ |= bit; break;
    default: throw ParseError(std::string("bad Pauli letter ") + letter);
  }
}

int PauliString::weight() const { return popcount64(x_ | z_); }

PauliString& PauliString::negate() {
  phase_ = (phase_ + 2) & 3;
  return *this;
}

PauliString& PauliString::operator*=(const PauliString& q) {
  if (n_ != q.n_) throw DimensionError("Pauli length mismatch " + std::to_string(n_) + " vs " + std::to_string(q.n_));
  const std::uint64_t x1 = x_, z1 = z_, x2 = q.x_, z2 = q.z_;
  // XY = iZ, YZ = iX, ZX = iY and the reverse orders give -i
  std::uint64_t plus = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2);
  std::uint64_t minus = (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2) | (x1 & ~z1 & ~x2 & z2);
  phase_ = (phase_ + q.phase_ + popcount64(plus) + 3 * popcount64(minus)) & 3;
  x_ ^= x2;
  z_ ^= z2;
  return *this;
}

PauliString PauliString::embed(int n) const {
  if (n < n_ && ((x_ | z_) & ~mask_for(n))) throw DimensionError("cannot shrink Pauli with support beyond new size");
  return PauliString(n, x_, z_, phase_);
}

std::string PauliString::str() const {
  std::string out;
  if (phase_ == 2) out = "-";
  else if (phase_ == 1) out = "i";
  else if (phase_ == 3) out = "-i";
  if (is_identity()) return out + "I";
  for (int q = 0; q < n_; ++q) {
    char c = letter(q);
    if (c != 'I') {
      out += c;
      out += std::to_string(q);
    }
  }
  return out;
}

PauliString multiply(const PauliString& p, const PauliString& q) {
  PauliString r = p;
  r *= q;
  return r;
}

int symplectic_product(const PauliString& p, const PauliString& q) {
  if (p.n() != q.n()) throw DimensionError("Pauli length mismatch");
  return parity64((p.x() & q.z()) ^ (p.z() & q.x()));
}

SyndromeVector SyndromeVector::from_string(std::string_view bits) {
  if (bits.size() > 64) throw ParseError("syndrome too long");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') v |= std::uint64_t{1} << i;
    else if (bits[i] != '0') throw ParseError("syndrome bits must be 0 or 1");
  }
  return SyndromeVector(static_cast<int>(bits.size()), v);
}

std::string SyndromeVector::str() const {
  std::string s;
  for (int i = 0; i < size_; ++i) s += (*this)[i] ? '1' : '0';
  return s;
}

SyndromeVector syndrome_of(const PauliString& error, const std::vector<PauliString>& generators) {
  if (generators.size() > 64) throw DimensionError("too many generators");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (symplectic_product(error, generators[i])) bits |= std::uint64_t{1} << i;
  return SyndromeVector(static_cast<int>(generators.size()), bits);
}

std::vector<PauliString> brute_force_min_weight(const SyndromeVector& syndrome, const CodeSpec& code, PauliClass cls) {
  if (code.n > 12) throw DimensionError("brute force limited to 12 qubits");
  if (syndrome.size() != static_cast<int>(code.stabilizers.size()))
    throw DimensionError("syndrome length does not match generator count");
  for (int w = 0; w <= code.n; ++w) {
    std::vector<PauliString> found;
    for_each_pauli_of_weight(code.n, w, cls, [&](const PauliString& p) {
      if (syndrome_of(p, code.stabilizers) == syndrome) found.push_back(p);
    });
    if (!found.empty()) return found;
  }
  throw ExhaustionError("no Pauli matches syndrome " + syndrome.str());
}

}  // namespace dfsqec
