#include "dfsqec/engine.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dfsqec {

namespace {

constexpr std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

void letter_bits(char letter, int q, std::uint64_t& x, std::uint64_t& z) {
  x = (letter == 'X' || letter == 'Y') ? bit(q) : 0;
  z = (letter == 'Z' || letter == 'Y') ? bit(q) : 0;
  if (!x && !z) throw std::invalid_argument(std::string("bad Pauli letter ") + letter);
}

}  // namespace

EngineKind parse_engine_kind(const std::string& s) {
  if (s == "clifford") return EngineKind::Clifford;
  if (s == "statevector") return EngineKind::StateVector;
  throw std::invalid_argument("unknown engine '" + s + "' (expected clifford or statevector)");
}

const char* engine_kind_name(EngineKind k) { return k == EngineKind::Clifford ? "clifford" : "statevector"; }

void Engine::pauli(int q, char letter) { apply_pauli(PauliString::single(num_qubits(), q, letter)); }

void Engine::to_z_basis(char letter, int q) {
  if (letter == 'X') {
    h(q);
  } else if (letter == 'Y') {
    sdg(q);
    h(q);
  } else if (letter != 'Z') {
    throw std::invalid_argument(std::string("bad basis ") + letter);
  }
}

void Engine::from_z_basis(char letter, int q) {
  if (letter == 'X') {
    h(q);
  } else if (letter == 'Y') {
    h(q);
    s(q);
  } else if (letter != 'Z') {
    throw std::invalid_argument(std::string("bad basis ") + letter);
  }
}

void Engine::controlled_pauli(char pc, int c, char pt, int t) {
  if (c == t) throw std::invalid_argument("controlled gate needs distinct qubits");
  to_z_basis(pc, c);
  if (pt == 'Z') h(t);
  else if (pt == 'Y') sdg(t);
  else if (pt != 'X') throw std::invalid_argument(std::string("bad target Pauli ") + pt);
  cnot(c, t);
  if (pt == 'Z') h(t);
  else if (pt == 'Y') s(t);
  from_z_basis(pc, c);
}

bool Engine::measure(char basis, int q, Rng& rng) {
  to_z_basis(basis, q);
  bool m = measure_z(q, rng);
  from_z_basis(basis, q);
  return m;
}

void Engine::reset(int q, Rng& rng) {
  if (measure_z(q, rng)) pauli(q, 'X');
}

// ---------------------------------------------------------------- tableau

TableauEngine::TableauEngine(int n) : n_(n), xs_(2 * n, 0), zs_(2 * n, 0), r_(2 * n, 0) {
  if (n < 1 || n > PauliString::kMaxQubits) throw CapabilityError("tableau supports 1..64 qubits");
  for (int i = 0; i < n; ++i) {
    xs_[i] = bit(i);
    zs_[i + n] = bit(i);
  }
}

void TableauEngine::h(int q) {
  for (int i = 0; i < 2 * n_; ++i) {
    std::uint64_t xq = (xs_[i] >> q) & 1u, zq = (zs_[i] >> q) & 1u;
    r_[i] ^= static_cast<std::uint8_t>(xq & zq);
    xs_[i] = (xs_[i] & ~bit(q)) | (zq << q);
    zs_[i] = (zs_[i] & ~bit(q)) | (xq << q);
  }
}

void TableauEngine::s(int q) {
  for (int i = 0; i < 2 * n_; ++i) {
    std::uint64_t xq = (xs_[i] >> q) & 1u, zq = (zs_[i] >> q) & 1u;
    r_[i] ^= static_cast<std::uint8_t>(xq & zq);
    zs_[i] ^= xq << q;
  }
}

void TableauEngine::sdg(int q) {
  for (int i = 0; i < 2 * n_; ++i) {
    std::uint64_t xq = (xs_[i] >> q) & 1u, zq = (zs_[i] >> q) & 1u;
    r_[i] ^= static_cast<std::uint8_t>(xq & (zq ^ 1u));
    zs_[i] ^= xq << q;
  }
}

void TableauEngine::cnot(int c, int t) {
  for (int i = 0; i < 2 * n_; ++i) {
    std::uint64_t xc = (xs_[i] >> c) & 1u, zc = (zs_[i] >> c) & 1u;
    std::uint64_t xt = (xs_[i] >> t) & 1u, zt = (zs_[i] >> t) & 1u;
    r_[i] ^= static_cast<std::uint8_t>(xc & zt & (xt ^ zc ^ 1u));
    xs_[i] ^= xc << t;
    zs_[i] ^= zt << c;
  }
}

void TableauEngine::apply_pauli(const PauliString& p) {
  if (p.n() != n_) throw DimensionError("Pauli size does not match tableau");
  for (int i = 0; i < 2 * n_; ++i) r_[i] ^= static_cast<std::uint8_t>(parity64((xs_[i] & p.z()) ^ (zs_[i] & p.x())));
}

void TableauEngine::rz(int q, double theta) {
  double quarter = theta / (std::numbers::pi / 2);
  double k = std::round(quarter);
  if (std::abs(quarter - k) > 1e-12)
    throw CapabilityError("clifford engine cannot apply RZ(" + std::to_string(theta) + ")");
  int m = ((static_cast<long long>(k) % 4) + 4) % 4;
  if (m == 1) s(q);
  else if (m == 2) pauli(q, 'Z');
  else if (m == 3) sdg(q);
}

void TableauEngine::rowmult(int target, int source) {
  PauliString a(n_, xs_[target], zs_[target], 2 * r_[target]);
  PauliString b(n_, xs_[source], zs_[source], 2 * r_[source]);
  a *= b;
  xs_[target] = a.x();
  zs_[target] = a.z();
  r_[target] = static_cast<std::uint8_t>((a.phase() >> 1) & 1);
}

bool TableauEngine::measure_z(int q, Rng& rng) {
  int p = -1;
  for (int i = n_; i < 2 * n_; ++i) {
    if ((xs_[i] >> q) & 1u) {
      p = i;
      break;
    }
  }
  if (p >= 0) {
    for (int i = 0; i < 2 * n_; ++i)
      if (i != p && ((xs_[i] >> q) & 1u)) rowmult(i, p);
    xs_[p - n_] = xs_[p];
    zs_[p - n_] = zs_[p];
    r_[p - n_] = r_[p];
    bool outcome = (rng() >> 63) & 1u;
    xs_[p] = 0;
    zs_[p] = bit(q);
    r_[p] = outcome;
    return outcome;
  }
  PauliString acc(n_);
  for (int i = 0; i < n_; ++i)
    if ((xs_[i] >> q) & 1u) acc *= PauliString(n_, xs_[i + n_], zs_[i + n_], 2 * r_[i + n_]);
  return acc.phase() == 2;
}

int TableauEngine::expectation(const PauliString& p) const {
  if (p.n() != n_) throw DimensionError("Pauli size does not match tableau");
  for (int i = n_; i < 2 * n_; ++i)
    if (parity64((xs_[i] & p.z()) ^ (zs_[i] & p.x()))) return 0;
  PauliString acc(n_);
  for (int i = 0; i < n_; ++i)
    if (parity64((xs_[i] & p.z()) ^ (zs_[i] & p.x())))
      acc *= PauliString(n_, xs_[i + n_], zs_[i + n_], 2 * r_[i + n_]);
  if (!acc.same_support_letters(p)) throw std::logic_error("tableau expectation inconsistent");
  int rel = (acc.phase() - p.phase() + 4) & 3;
  if (rel == 0) return 1;
  if (rel == 2) return -1;
  throw std::logic_error("non-Hermitian expectation request");
}

std::vector<PauliString> TableauEngine::stabilizers() const {
  std::vector<PauliString> out;
  for (int i = n_; i < 2 * n_; ++i) out.emplace_back(n_, xs_[i], zs_[i], 2 * r_[i]);
  return out;
}

// ---------------------------------------------------------- state vector

StateVectorEngine::StateVectorEngine(int n, int cap) : n_(n) {
  if (n < 1) throw CapabilityError("state vector needs at least one qubit");
  if (n > cap) throw CapabilityError("state vector limited to " + std::to_string(cap) + " qubits, requested " + std::to_string(n));
  amp_.assign(std::size_t{1} << n, 0.0);
  amp_[0] = 1.0;
}

void StateVectorEngine::check(int q) const {
  if (q < 0 || q >= n_) throw DimensionError("qubit out of range");
}

void StateVectorEngine::h(int q) {
  check(q);
  const std::size_t step = std::size_t{1} << q;
  const double r = std::numbers::sqrt2 / 2;
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    if (i & step) continue;
    auto a = amp_[i], b = amp_[i | step];
    amp_[i] = (a + b) * r;
    amp_[i | step] = (a - b) * r;
  }
}

void StateVectorEngine::s(int q) {
  check(q);
  const std::size_t step = std::size_t{1} << q;
  for (std::size_t i = 0; i < amp_.size(); ++i)
    if (i & step) amp_[i] *= std::complex<double>(0, 1);
}

void StateVectorEngine::sdg(int q) {
  check(q);
  const std::size_t step = std::size_t{1} << q;
  for (std::size_t i = 0; i < amp_.size(); ++i)
    if (i & step) amp_[i] *= std::complex<double>(0, -1);
}

void StateVectorEngine::cnot(int c, int t) {
  check(c);
  check(t);
  const std::size_t cb = std::size_t{1} << c, tb = std::size_t{1} << t;
  for (std::size_t i = 0; i < amp_.size(); ++i)
    if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
}

void StateVectorEngine::apply_pauli(const PauliString& p) {
  if (p.n() != n_) throw DimensionError("Pauli size does not match state");
  static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::uint64_t xm = p.x(), zm = p.z();
  const std::complex<double> base = ipow[(p.phase() + popcount64(xm & zm)) & 3];
  std::vector<std::complex<double>> out(amp_.size());
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    std::complex<double> f = (popcount64(i & zm) & 1) ? -base : base;
    out[i ^ xm] = f * amp_[i];
  }
  amp_.swap(out);
}

void StateVectorEngine::rz(int q, double theta) {
  check(q);
  const std::size_t step = std::size_t{1} << q;
  const std::complex<double> a = std::polar(1.0, -theta / 2), b = std::polar(1.0, theta / 2);
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] *= (i & step) ? b : a;
}

double StateVectorEngine::probability_one(int q) const {
  check(q);
  const std::size_t step = std::size_t{1} << q;
  double p = 0;
  for (std::size_t i = 0; i < amp_.size(); ++i)
    if (i & step) p += std::norm(amp_[i]);
  return p;
}

bool StateVectorEngine::measure_z(int q, Rng& rng) {
  double p1 = probability_one(q);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  bool outcome = u < p1;
  double norm = std::sqrt(outcome ? p1 : 1.0 - p1);
  const std::size_t step = std::size_t{1} << q;
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    if (static_cast<bool>(i & step) == outcome) amp_[i] /= norm;
    else amp_[i] = 0.0;
  }
  return outcome;
}

std::complex<double> StateVectorEngine::inner_product(const StateVectorEngine& other) const {
  if (other.n_ != n_) throw DimensionError("state size mismatch");
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i < amp_.size(); ++i) acc += std::conj(amp_[i]) * other.amp_[i];
  return acc;
}

double StateVectorEngine::fidelity(const StateVectorEngine& other) const { return std::norm(inner_product(other)); }

double StateVectorEngine::expectation(const PauliString& p) const {
  StateVectorEngine copy = *this;
  copy.apply_pauli(p);
  return inner_product(copy).real();
}

std::unique_ptr<Engine> make_engine(EngineKind kind, int n) {
  if (kind == EngineKind::Clifford) return std::make_unique<TableauEngine>(n);
  return std::make_unique<StateVectorEngine>(n);
}

// ------------------------------------------------------------------ frame

void Frame::h(int q) {
  std::uint64_t xq = (x >> q) & 1u, zq = (z >> q) & 1u;
  x = (x & ~bit(q)) | (zq << q);
  z = (z & ~bit(q)) | (xq << q);
}

void Frame::s(int q) { z ^= ((x >> q) & 1u) << q; }

void Frame::controlled_pauli(char pc, int c, char pt, int t) {
  std::uint64_t pcx, pcz, ptx, ptz;
  letter_bits(pc, c, pcx, pcz);
  letter_bits(pt, t, ptx, ptz);
  const bool ctrl = parity64((x & pcz) ^ (z & pcx));
  const bool targ = parity64((x & ptz) ^ (z & ptx));
  if (ctrl) {
    x ^= ptx;
    z ^= ptz;
  }
  if (targ) {
    x ^= pcx;
    z ^= pcz;
  }
}

bool Frame::flips(char basis, int q) const {
  std::uint64_t bx, bz;
  letter_bits(basis, q, bx, bz);
  return parity64((x & bz) ^ (z & bx));
}

PauliString Frame::restricted(int n) const {
  std::uint64_t m = n >= 64 ? ~std::uint64_t{0} : (bit(n) - 1);
  return PauliString(n, x & m, z & m, 0);
}

}  // namespace dfsqec
