#include "dfsqec/circuit.hpp"

#include <cmath>
#include <sstream>

namespace dfsqec {

bool Predicate::eval(const std::vector<std::uint64_t>& regs) const {
  if (kind == Kind::AllEqual) {
    for (const auto& [r, v] : terms)
      if (regs[r] != v) return false;
    return true;
  }
  for (const auto& [r, v] : terms)
    if (regs[r] != v) return true;
  return false;
}

std::string bits_to_string(std::uint64_t v, int size) {
  std::string s;
  for (int i = 0; i < size; ++i) s += ((v >> i) & 1u) ? '1' : '0';
  return s;
}

std::uint64_t bits_from_string(const std::string& s) {
  if (s.empty() || s.size() > 64) throw CircuitError("bad bit string '" + s + "'");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') v |= std::uint64_t{1} << i;
    else if (s[i] != '0') throw CircuitError("bad bit string '" + s + "'");
  }
  return v;
}

Circuit::Circuit(const Circuit& o) : n_qubits_(o.n_qubits_), regs_(o.regs_), top_(o.top_) {
  if (!o.open_.empty()) throw CircuitError("cannot copy a circuit with open blocks");
}

Circuit& Circuit::operator=(const Circuit& o) {
  if (this != &o) {
    if (!o.open_.empty()) throw CircuitError("cannot copy a circuit with open blocks");
    n_qubits_ = o.n_qubits_;
    regs_ = o.regs_;
    top_ = o.top_;
    open_.clear();
  }
  return *this;
}

int Circuit::add_register(const std::string& name, int size) {
  if (size < 1 || size > 64) throw CircuitError("register size must be 1..64");
  if (name.empty()) throw CircuitError("register needs a name");
  if (register_index(name) >= 0) throw CircuitError("register '" + name + "' declared twice");
  regs_.push_back({name, size});
  return static_cast<int>(regs_.size()) - 1;
}

int Circuit::register_index(const std::string& name) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name == name) return static_cast<int>(i);
  return -1;
}

int Circuit::require_register(const std::string& name) const {
  int i = register_index(name);
  if (i < 0) throw CircuitError("undeclared register '" + name + "'");
  return i;
}

void Circuit::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits_) throw CircuitError("qubit " + std::to_string(q) + " out of range");
}

std::vector<Instruction>& Circuit::sink() { return open_.empty() ? top_ : *open_.back(); }

Instruction& Circuit::push(Instruction ins) {
  auto& s = sink();
  s.push_back(std::move(ins));
  return s.back();
}

Circuit& Circuit::one(Op op, int q) {
  check_qubit(q);
  Instruction ins;
  ins.op = op;
  ins.qubits = {q};
  push(std::move(ins));
  return *this;
}

Circuit& Circuit::pauli(char letter, int q) {
  switch (letter) {
    case 'X': return x(q);
    case 'Y': return y(q);
    case 'Z': return z(q);
    case 'I': return *this;
    default: throw CircuitError(std::string("bad Pauli letter ") + letter);
  }
}

Circuit& Circuit::cp(char pc, int c, char pt, int t) {
  check_qubit(c);
  check_qubit(t);
  if (c == t) throw CircuitError("two-qubit gate on a single qubit");
  auto ok = [](char l) { return l == 'X' || l == 'Y' || l == 'Z'; };
  if (!ok(pc) || !ok(pt)) throw CircuitError("controlled-Pauli letters must be X, Y or Z");
  Instruction ins;
  ins.op = Op::CP;
  ins.qubits = {c, t};
  ins.pc = pc;
  ins.pt = pt;
  push(std::move(ins));
  return *this;
}

Circuit& Circuit::rz(int q, double theta) {
  one(Op::RZ, q);
  sink().back().param = theta;
  return *this;
}

Circuit& Circuit::measure(char basis, int q, const std::string& reg, int bit) {
  if (basis != 'X' && basis != 'Y' && basis != 'Z') throw CircuitError("measurement basis must be X, Y or Z");
  int r = require_register(reg);
  if (bit < 0 || bit >= regs_[r].size) throw CircuitError("bit out of range for register '" + reg + "'");
  one(Op::Measure, q);
  sink().back().pc = basis;
  sink().back().target = {r, bit};
  return *this;
}

Circuit& Circuit::leak_detect(int q, const std::string& reg, int bit) {
  int r = require_register(reg);
  if (bit < 0 || bit >= regs_[r].size) throw CircuitError("bit out of range for register '" + reg + "'");
  one(Op::LeakDetect, q);
  sink().back().target = {r, bit};
  return *this;
}

Circuit& Circuit::idle(std::vector<int> qubits, double duration) {
  if (!(duration >= 0) || !std::isfinite(duration)) throw CircuitError("idle duration must be >= 0");
  for (int q : qubits) check_qubit(q);
  Instruction ins;
  ins.op = Op::Idle;
  ins.qubits = std::move(qubits);
  ins.param = duration;
  push(std::move(ins));
  return *this;
}

Circuit& Circuit::barrier(std::vector<int> qubits) {
  for (int q : qubits) check_qubit(q);
  Instruction ins;
  ins.op = Op::Barrier;
  ins.qubits = std::move(qubits);
  push(std::move(ins));
  return *this;
}

Circuit& Circuit::begin_if(Predicate pred) {
  if (pred.terms.empty()) throw CircuitError("empty predicate");
  for (const auto& [r, v] : pred.terms) {
    if (r < 0 || r >= static_cast<int>(regs_.size())) throw CircuitError("predicate references unknown register");
    if (regs_[r].size < 64 && (v >> regs_[r].size)) throw CircuitError("predicate value wider than register");
  }
  Instruction ins;
  ins.op = Op::If;
  ins.pred = std::move(pred);
  Instruction& placed = push(std::move(ins));
  open_.push_back(&placed.body);
  return *this;
}

Circuit& Circuit::end_if() {
  if (open_.empty()) throw CircuitError("end_if without begin_if");
  open_.pop_back();
  return *this;
}

std::pair<int, std::uint64_t> Circuit::term(const std::string& reg, std::uint64_t value) const {
  return {require_register(reg), value};
}

namespace {

void remap(std::vector<Instruction>& block, const std::vector<int>& map) {
  for (auto& ins : block) {
    if (ins.target.reg >= 0) ins.target.reg = map[ins.target.reg];
    for (auto& t : ins.pred.terms) t.first = map[t.first];
    remap(ins.body, map);
  }
}

}  // namespace

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ > n_qubits_) throw CircuitError("appended circuit uses more qubits");
  std::vector<int> map;
  for (const auto& r : other.regs_) {
    int i = register_index(r.name);
    if (i < 0) i = add_register(r.name, r.size);
    else if (regs_[i].size != r.size) throw CircuitError("register '" + r.name + "' size mismatch");
    map.push_back(i);
  }
  std::vector<Instruction> copy = other.top_;
  remap(copy, map);
  for (auto& ins : copy) push(std::move(ins));
  return *this;
}

std::size_t count_instructions(const std::vector<Instruction>& block) {
  std::size_t n = 0;
  for (const auto& ins : block) n += 1 + count_instructions(ins.body);
  return n;
}

std::size_t Circuit::instruction_count() const { return count_instructions(top_); }

void Circuit::validate() const {
  if (!open_.empty()) throw CircuitError("circuit has an unclosed conditional block");
  std::vector<const std::vector<Instruction>*> stack{&top_};
  while (!stack.empty()) {
    const auto* block = stack.back();
    stack.pop_back();
    for (const auto& ins : *block) {
      for (int q : ins.qubits) check_qubit(q);
      if (ins.op == Op::Measure || ins.op == Op::LeakDetect) {
        if (ins.target.reg < 0 || ins.target.reg >= static_cast<int>(regs_.size()))
          throw CircuitError("measurement without a declared register");
        if (ins.target.bit < 0 || ins.target.bit >= regs_[ins.target.reg].size)
          throw CircuitError("measurement bit out of range");
      }
      if (ins.op == Op::If) {
        for (const auto& t : ins.pred.terms)
          if (t.first < 0 || t.first >= static_cast<int>(regs_.size())) throw CircuitError("bad predicate register");
        stack.push_back(&ins.body);
      }
    }
  }
}

// ------------------------------------------------------------------ text

namespace {

std::string op_name(const Instruction& ins) {
  switch (ins.op) {
    case Op::H: return "H";
    case Op::S: return "S";
    case Op::Sdg: return "SDG";
    case Op::X: return "X";
    case Op::Y: return "Y";
    case Op::Z: return "Z";
    case Op::CP:
      if (ins.pc == 'Z' && ins.pt == 'X') return "CNOT";
      if (ins.pc == 'Z' && ins.pt == 'Z') return "CZ";
      return std::string("C") + ins.pc + ins.pt;
    case Op::RZ: return "RZ";
    case Op::Prep: return "PREP";
    case Op::Reset: return "RESET";
    case Op::Measure: return std::string("M") + ins.pc;
    case Op::LeakDetect: return "LEAK";
    case Op::Idle: return "IDLE";
    case Op::Barrier: return "BARRIER";
    case Op::If: return "if";
  }
  return "?";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  std::string s = os.str();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string pred_text(const Predicate& p, const std::vector<Register>& regs) {
  std::string out;
  const char* op = p.kind == Predicate::Kind::AllEqual ? "==" : "!=";
  const char* join = p.kind == Predicate::Kind::AllEqual ? " & " : " | ";
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    if (i) out += join;
    const auto& [r, v] = p.terms[i];
    out += regs[r].name + op + bits_to_string(v, regs[r].size);
  }
  return out;
}

void emit(const std::vector<Instruction>& block, const std::vector<Register>& regs, int depth, std::ostringstream& os) {
  const std::string pad(2 * depth, ' ');
  for (const auto& ins : block) {
    if (ins.op == Op::If) {
      os << pad << "if " << pred_text(ins.pred, regs) << " {\n";
      emit(ins.body, regs, depth + 1, os);
      os << pad << "}\n";
      continue;
    }
    os << pad << op_name(ins);
    for (int q : ins.qubits) os << ' ' << q;
    if (ins.op == Op::RZ || ins.op == Op::Idle) os << ' ' << num(ins.param);
    if (ins.target.reg >= 0) os << " -> " << regs[ins.target.reg].name << '[' << ins.target.bit << ']';
    os << '\n';
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw CircuitError("line " + std::to_string(line) + ": expected integer, got '" + s + "'");
  }
}

double parse_num(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw CircuitError("line " + std::to_string(line) + ": expected number, got '" + s + "'");
  }
}

Predicate parse_pred(const Circuit& c, const std::string& text, int line) {
  Predicate p;
  bool has_and = text.find('&') != std::string::npos, has_or = text.find('|') != std::string::npos;
  if (has_and && has_or) throw CircuitError("line " + std::to_string(line) + ": cannot mix & and |");
  std::string cleaned;
  for (char ch : text) cleaned += (ch == '&' || ch == '|') ? ' ' : ch;
  bool any_eq = false, any_ne = false;
  for (const auto& tok : split_ws(cleaned)) {
    auto pos = tok.find("==");
    bool ne = false;
    if (pos == std::string::npos) {
      pos = tok.find("!=");
      ne = true;
    }
    if (pos == std::string::npos) throw CircuitError("line " + std::to_string(line) + ": bad predicate term '" + tok + "'");
    (ne ? any_ne : any_eq) = true;
    std::string name = tok.substr(0, pos), value = tok.substr(pos + 2);
    int r = c.register_index(name);
    if (r < 0) throw CircuitError("line " + std::to_string(line) + ": undeclared register '" + name + "'");
    if (static_cast<int>(value.size()) != c.registers()[r].size)
      throw CircuitError("line " + std::to_string(line) + ": value width differs from register '" + name + "'");
    p.terms.emplace_back(r, bits_from_string(value));
  }
  if (p.terms.empty()) throw CircuitError("line " + std::to_string(line) + ": empty predicate");
  if (any_eq && any_ne) throw CircuitError("line " + std::to_string(line) + ": mixed == and != terms");
  if (any_ne && has_and) throw CircuitError("line " + std::to_string(line) + ": != terms join with |");
  if (any_eq && has_or) throw CircuitError("line " + std::to_string(line) + ": == terms join with &");
  p.kind = any_ne ? Predicate::Kind::AnyDiffers : Predicate::Kind::AllEqual;
  return p;
}

}  // namespace

std::string Circuit::to_text() const {
  validate();
  std::ostringstream os;
  os << "qubits " << n_qubits_ << '\n';
  for (const auto& r : regs_) os << "creg " << r.name << ' ' << r.size << '\n';
  emit(top_, regs_, 0, os);
  return os.str();
}

Circuit Circuit::parse(const std::string& text) {
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  Circuit c(0);
  bool have_qubits = false;
  auto fail = [&](const std::string& why) { throw CircuitError("line " + std::to_string(line) + ": " + why); };
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    auto toks = split_ws(raw);
    if (toks.empty()) continue;
    const std::string& head = toks[0];
    if (head == "qubits") {
      if (have_qubits || toks.size() != 2) fail("bad qubits declaration");
      c.n_qubits_ = parse_int(toks[1], line);
      if (c.n_qubits_ < 1) fail("qubit count must be positive");
      have_qubits = true;
      continue;
    }
    if (!have_qubits) fail("qubits declaration must come first");
    if (head == "creg") {
      if (toks.size() != 3) fail("creg needs a name and a size");
      c.add_register(toks[1], parse_int(toks[2], line));
      continue;
    }
    if (head == "}") {
      if (toks.size() != 1) fail("unexpected tokens after }");
      if (c.open_.empty()) fail("unbalanced }");
      c.end_if();
      continue;
    }
    if (head == "if") {
      if (toks.back() != "{") fail("block if must end with {");
      std::string body = raw.substr(raw.find("if") + 2);
      body = body.substr(0, body.rfind('{'));
      c.begin_if(parse_pred(c, body, line));
      continue;
    }
    // optional per-line condition suffix
    std::string cond;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      if (toks[i] == "if") {
        for (std::size_t j = i + 1; j < toks.size(); ++j) cond += toks[j] + ' ';
        toks.resize(i);
        if (cond.empty()) fail("empty condition");
        break;
      }
    }
    BitRef target;
    std::string target_reg;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      if (toks[i] == "->") {
        if (i + 2 != toks.size()) fail("'-> reg[i]' must end the instruction");
        const std::string& t = toks[i + 1];
        auto lb = t.find('['), rb = t.find(']');
        if (lb == std::string::npos || rb != t.size() - 1) fail("bad register reference '" + t + "'");
        target_reg = t.substr(0, lb);
        target.bit = parse_int(t.substr(lb + 1, rb - lb - 1), line);
        toks.resize(i);
        break;
      }
    }
    if (!cond.empty()) c.begin_if(parse_pred(c, cond, line));
    std::vector<std::string> args(toks.begin() + 1, toks.end());
    auto need = [&](std::size_t k) {
      if (args.size() != k) fail(head + " expects " + std::to_string(k) + " operands");
    };
    auto needs_target = [&](bool want) {
      if (want != !target_reg.empty()) fail(want ? head + " needs '-> reg[i]'" : head + " takes no register");
    };
    if (head == "H" || head == "S" || head == "SDG" || head == "X" || head == "Y" || head == "Z" || head == "PREP" ||
        head == "RESET") {
      need(1);
      needs_target(false);
      int q = parse_int(args[0], line);
      if (head == "H") c.h(q);
      else if (head == "S") c.s(q);
      else if (head == "SDG") c.sdg(q);
      else if (head == "PREP") c.prep(q);
      else if (head == "RESET") c.reset(q);
      else c.pauli(head[0], q);
    } else if (head == "CNOT" || head == "CZ" || (head.size() == 3 && head[0] == 'C')) {
      need(2);
      needs_target(false);
      char pc = 'Z', pt = head == "CZ" ? 'Z' : 'X';
      if (head != "CNOT" && head != "CZ") {
        pc = head[1];
        pt = head[2];
      }
      c.cp(pc, parse_int(args[0], line), pt, parse_int(args[1], line));
    } else if (head == "RZ") {
      need(2);
      needs_target(false);
      c.rz(parse_int(args[0], line), parse_num(args[1], line));
    } else if (head == "MZ" || head == "MX" || head == "MY") {
      need(1);
      needs_target(true);
      c.measure(head[1], parse_int(args[0], line), target_reg, target.bit);
    } else if (head == "LEAK") {
      need(1);
      needs_target(true);
      c.leak_detect(parse_int(args[0], line), target_reg, target.bit);
    } else if (head == "IDLE") {
      if (args.empty()) fail("IDLE needs a duration");
      needs_target(false);
      std::vector<int> qs;
      for (std::size_t i = 0; i + 1 < args.size(); ++i) qs.push_back(parse_int(args[i], line));
      c.idle(qs, parse_num(args.back(), line));
    } else if (head == "BARRIER") {
      needs_target(false);
      std::vector<int> qs;
      for (const auto& a : args) qs.push_back(parse_int(a, line));
      c.barrier(qs);
    } else {
      fail("unknown instruction '" + head + "'");
    }
    if (!cond.empty()) c.end_if();
  }
  if (!have_qubits) throw CircuitError("missing qubits declaration");
  c.validate();
  return c;
}

}  // namespace dfsqec
