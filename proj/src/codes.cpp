#include "dfsqec/codes.hpp"

#include <sstream>

namespace dfsqec {

namespace {

std::vector<PauliString> parse_all(const std::vector<std::string>& texts, int n) {
  std::vector<PauliString> out;
  for (const auto& t : texts) out.push_back(PauliString::parse(t, n));
  return out;
}

PauliString i_times_product(const PauliString& a, const PauliString& b) {
  PauliString p = multiply(a, b);
  return PauliString(p.n(), p.x(), p.z(), p.phase() + 1);
}

}  // namespace

CodeSpec build_dfs() {
  CodeSpec c;
  c.name = "[[2,1,1]]";
  c.n = 2;
  c.d = 1;
  c.stabilizers = {PauliString::parse("-Z0Z1", 2)};
  c.labels = {"r0"};
  c.logical_x = PauliString::parse("X0X1", 2);
  c.logical_z = PauliString::parse("Z0", 2);
  c.logical_y = i_times_product(c.logical_x, c.logical_z);
  return c;
}

CodeSpec build_513() {
  CodeSpec c;
  c.name = "[[5,1,3]]";
  c.n = 5;
  c.d = 3;
  c.stabilizers = parse_all({"X0Z1Z2X3", "X1Z2Z3X4", "X0X2Z3Z4", "Z0X1X3Z4"}, 5);
  c.labels = {"s0", "s1", "s2", "s3"};
  c.logical_x = PauliString::parse("X0X1X2X3X4", 5);
  c.logical_z = PauliString::parse("Z0Z1Z2Z3Z4", 5);
  c.logical_y = i_times_product(c.logical_x, c.logical_z);
  return c;
}

CodeSpec build_1014() {
  CodeSpec c;
  c.name = "[[10,1,4]]";
  c.n = 10;
  c.d = 4;
  c.stabilizers = parse_all({"-Z0Z1", "-Z2Z3", "-Z4Z5", "-Z6Z7", "-Z8Z9", "X0X1Z2Z4X6X7", "X2X3Z4Z6X8X9",
                             "X0X1X4X5Z6Z8", "Z0X2X3X6X7Z8"},
                            10);
  c.labels = {"r0", "r1", "r2", "r3", "r4", "s0", "s1", "s2", "s3"};
  c.logical_x = PauliString::parse("X0X1X2X3X4X5X6X7X8X9", 10);
  c.logical_z = PauliString::parse("Z0Z2Z4Z6Z8", 10);
  c.logical_y = i_times_product(c.logical_x, c.logical_z);
  return c;
}

CodeSpec build_code(const std::string& name) {
  if (name == "211" || name == "dfs") return build_dfs();
  if (name == "513") return build_513();
  if (name == "1014") return build_1014();
  throw std::invalid_argument("unknown code '" + name + "' (expected 211, 513 or 1014)");
}

PauliString redundant_check_1014() {
  CodeSpec c = build_1014();
  return c.stabilizers[5] * c.stabilizers[6] * c.stabilizers[7] * c.stabilizers[8];
}

PauliString ConcatenationMap::map(const PauliString& op) const {
  if (op.n() != outer.n) throw DimensionError("operator does not act on the outer code");
  const int n = outer.n * inner.n;
  PauliString out(n);
  int base_phase = op.phase();
  out = PauliString(n, 0, 0, base_phase);
  for (int i = 0; i < outer.n; ++i) {
    char l = op.letter(i);
    if (l == 'I') continue;
    const PauliString& lop = l == 'X' ? inner.logical_x : l == 'Y' ? inner.logical_y : inner.logical_z;
    PauliString placed(n);
    for (int j = 0; j < inner.n; ++j) {
      int target = j == 0 ? pairing[i].first : pairing[i].second;
      placed.set(target, lop.letter(j));
    }
    placed = PauliString(n, placed.x(), placed.z(), lop.phase());
    out *= placed;
  }
  return out;
}

CodeSpec ConcatenationMap::concatenate() const {
  CodeSpec c;
  c.n = outer.n * inner.n;
  c.k = 1;
  c.d = 4;
  c.name = "[[10,1,4]]";
  for (int i = 0; i < outer.n; ++i) {
    for (std::size_t g = 0; g < inner.stabilizers.size(); ++g) {
      const PauliString& s = inner.stabilizers[g];
      PauliString placed(c.n);
      placed.set(pairing[i].first, s.letter(0));
      placed.set(pairing[i].second, s.letter(1));
      c.stabilizers.push_back(PauliString(c.n, placed.x(), placed.z(), s.phase()));
      c.labels.push_back("r" + std::to_string(i));
    }
  }
  for (std::size_t g = 0; g < outer.stabilizers.size(); ++g) {
    c.stabilizers.push_back(map(outer.stabilizers[g]));
    c.labels.push_back(outer.labels[g]);
  }
  c.logical_x = map(outer.logical_x);
  c.logical_z = map(outer.logical_z);
  c.logical_y = map(outer.logical_y);
  return c;
}

ConcatenationMap dfs_in_513() {
  ConcatenationMap m;
  m.outer = build_513();
  m.inner = build_dfs();
  for (int i = 0; i < 5; ++i) m.pairing.emplace_back(2 * i, 2 * i + 1);
  return m;
}

std::vector<PauliString> stabilizer_group(const CodeSpec& code) {
  const std::size_t m = code.stabilizers.size();
  if (m > 20) throw DimensionError("stabilizer group too large to enumerate");
  std::vector<PauliString> out;
  out.reserve(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    PauliString p(code.n);
    for (std::size_t g = 0; g < m; ++g)
      if ((mask >> g) & 1u) p *= code.stabilizers[g];
    out.push_back(p);
  }
  return out;
}

bool in_stabilizer_group(const PauliString& p, const CodeSpec& code) {
  for (const auto& g : code.stabilizers)
    if (!commutes(p, g)) return false;
  return commutes(p, code.logical_x) && commutes(p, code.logical_z);
}

bool is_nontrivial_logical(const PauliString& p, const CodeSpec& code) {
  for (const auto& g : code.stabilizers)
    if (!commutes(p, g)) return false;
  return !commutes(p, code.logical_x) || !commutes(p, code.logical_z);
}

int logical_class(const PauliString& p, const CodeSpec& code) {
  return symplectic_product(p, code.logical_z) | (symplectic_product(p, code.logical_x) << 1);
}

int reduced_weight(const PauliString& p, const CodeSpec& code) {
  int best = p.weight();
  const std::size_t m = code.stabilizers.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::uint64_t x = p.x(), z = p.z();
    for (std::size_t g = 0; g < m; ++g) {
      if ((mask >> g) & 1u) {
        x ^= code.stabilizers[g].x();
        z ^= code.stabilizers[g].z();
      }
    }
    best = std::min(best, popcount64(x | z));
  }
  return best;
}

int code_distance(const CodeSpec& code) {
  if (code.n > 10) throw DimensionError("distance enumeration limited to 10 qubits");
  for (int w = 1; w <= code.n; ++w) {
    bool found = false;
    for_each_pauli_of_weight(code.n, w, PauliClass::Any, [&](const PauliString& p) {
      if (!found && is_nontrivial_logical(p, code)) found = true;
    });
    if (found) return w;
  }
  return 0;
}

VerificationReport verify_code(const CodeSpec& code) {
  VerificationReport r;
  r.code = code.name;
  const auto& gens = code.stabilizers;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (!gens[i].hermitian()) {
      r.commutation_ok = false;
      r.failures.push_back("generator " + code.labels[i] + " is not Hermitian");
    }
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (!commutes(gens[i], gens[j])) {
        r.commutation_ok = false;
        r.failures.push_back("generators " + code.labels[i] + " and " + code.labels[j] + " anticommute");
      }
    }
  }
  const std::pair<const char*, const PauliString*> logicals[] = {
      {"X", &code.logical_x}, {"Y", &code.logical_y}, {"Z", &code.logical_z}};
  for (const auto& [name, op] : logicals) {
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (!commutes(*op, gens[i])) {
        r.logical_ok = false;
        r.failures.push_back(std::string("logical ") + name + " anticommutes with " + code.labels[i]);
      }
    }
  }
  if (commutes(code.logical_x, code.logical_z)) {
    r.logical_ok = false;
    r.failures.push_back("logical X and logical Z commute");
  }
  if (code.logical_y != i_times_product(code.logical_x, code.logical_z)) {
    r.logical_ok = false;
    r.failures.push_back("logical Y differs from i X Z");
  }
  auto group = stabilizer_group(code);
  for (std::size_t a = 1; a < group.size(); ++a) {
    if (group[a].is_identity()) {
      r.group_ok = false;
      r.failures.push_back(group[a].phase() == 0 ? "generators are dependent" : "-I lies in the stabilizer group");
      break;
    }
  }
  r.distance = code_distance(code);
  r.distance_ok = r.distance == code.d;
  if (!r.distance_ok)
    r.failures.push_back("distance " + std::to_string(r.distance) + " differs from expected " + std::to_string(code.d));
  if (code.name == "[[10,1,4]]") {
    r.concatenation_checked = true;
    CodeSpec cat = dfs_in_513().concatenate();
    for (std::size_t i = 0; i < gens.size() && i < cat.stabilizers.size(); ++i) {
      if (gens[i] != cat.stabilizers[i]) {
        r.concatenation_ok = false;
        r.failures.push_back("concatenation gives " + cat.stabilizers[i].str() + " for " + code.labels[i] + " = " +
                             gens[i].str());
      }
    }
    if (gens.size() != cat.stabilizers.size() || cat.logical_x != code.logical_x || cat.logical_z != code.logical_z ||
        cat.logical_y != code.logical_y) {
      r.concatenation_ok = false;
      r.failures.push_back("concatenated logical operators differ");
    }
  }
  return r;
}

void require_valid(const CodeSpec& code) {
  auto r = verify_code(code);
  if (!r.ok()) throw VerificationError(code.name + ": " + r.failures.front());
}

std::vector<PauliString> minimal_even_distance_logicals(const CodeSpec& code) {
  if (code.name != "[[10,1,4]]" || code.n != 10) throw std::invalid_argument("unsupported code " + code.name);
  std::vector<PauliString> out;
  for (int i = 0; i < 5; ++i) {
    PauliString p(10);
    p.set((2 * i + 8) % 10, 'Z');
    p.set(2 * i, 'X');
    p.set(2 * i + 1, 'X');
    p.set((2 * i + 2) % 10, 'Z');
    out.push_back(p);
  }
  return out;
}

std::string code_document(const CodeSpec& code, const VerificationReport& r) {
  auto pass = [](bool b) { return b ? "pass" : "FAIL"; };
  std::ostringstream os;
  os << "name: " << code.name << "\n";
  os << "n: " << code.n << "\nk: " << code.k << "\nd: " << code.d << "\n";
  os << "generators:\n";
  for (std::size_t i = 0; i < code.stabilizers.size(); ++i)
    os << "  " << code.labels[i] << ": " << code.stabilizers[i].str() << "\n";
  if (code.name == "[[10,1,4]]") os << "  sp: " << redundant_check_1014().str() << "  # redundant\n";
  os << "logical_x: " << code.logical_x.str() << "\n";
  os << "logical_y: " << code.logical_y.str() << "\n";
  os << "logical_z: " << code.logical_z.str() << "\n";
  os << "checks:\n";
  os << "  commutation: " << pass(r.commutation_ok) << "\n";
  os << "  logical_algebra: " << pass(r.logical_ok) << "\n";
  os << "  group: " << pass(r.group_ok) << "\n";
  os << "  distance: " << r.distance << " (expected " << code.d << ") " << pass(r.distance_ok) << "\n";
  if (r.concatenation_checked) os << "  concatenation: " << pass(r.concatenation_ok) << "\n";
  for (const auto& f : r.failures) os << "failure: " << f << "\n";
  os << "status: " << (r.ok() ? "ok" : "failed") << "\n";
  return os.str();
}

}  // namespace dfsqec
