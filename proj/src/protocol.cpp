#include "dfsqec/protocol.hpp"

#include <chrono>
#include <sstream>

#include "dfsqec/rng.hpp"

namespace dfsqec {

// ------------------------------------------------------------------ states

LogicalState parse_state(const std::string& s) {
  if (s == "0") return LogicalState::Zero;
  if (s == "1") return LogicalState::One;
  if (s == "+") return LogicalState::Plus;
  if (s == "-") return LogicalState::Minus;
  if (s == "+i") return LogicalState::PlusI;
  if (s == "-i") return LogicalState::MinusI;
  throw std::invalid_argument("unknown state '" + s + "' (expected 0, 1, +, -, +i, -i)");
}

std::string state_name(LogicalState s) {
  switch (s) {
    case LogicalState::Zero: return "0";
    case LogicalState::One: return "1";
    case LogicalState::Plus: return "+";
    case LogicalState::Minus: return "-";
    case LogicalState::PlusI: return "+i";
    case LogicalState::MinusI: return "-i";
  }
  return "?";
}

char state_basis(LogicalState s) {
  if (s == LogicalState::Zero || s == LogicalState::One) return 'Z';
  if (s == LogicalState::Plus || s == LogicalState::Minus) return 'X';
  return 'Y';
}

bool state_is_negative(LogicalState s) {
  return s == LogicalState::One || s == LogicalState::Minus || s == LogicalState::MinusI;
}

LogicalState orthogonal_state(LogicalState s) {
  switch (s) {
    case LogicalState::Zero: return LogicalState::One;
    case LogicalState::One: return LogicalState::Zero;
    case LogicalState::Plus: return LogicalState::Minus;
    case LogicalState::Minus: return LogicalState::Plus;
    case LogicalState::PlusI: return LogicalState::MinusI;
    case LogicalState::MinusI: return LogicalState::PlusI;
  }
  return s;
}

const std::array<LogicalState, 6>& all_states() {
  static const std::array<LogicalState, 6> s = {LogicalState::Zero, LogicalState::One,   LogicalState::Plus,
                                                LogicalState::Minus, LogicalState::PlusI, LogicalState::MinusI};
  return s;
}

// --------------------------------------------------------- state prep

namespace {

struct PrepGate {
  char kind;  // 'H', 'S' (S dagger in the forward pass) or 'C'
  int a;
  int b;
};

}  // namespace

Circuit synthesize_state_prep(const std::vector<PauliString>& gens, int n_total) {
  if (gens.empty()) throw std::invalid_argument("no generators");
  const int k = gens.front().n();
  if (static_cast<int>(gens.size()) != k) throw std::invalid_argument("need one generator per qubit");
  if (n_total < k) throw std::invalid_argument("circuit too small");
  std::vector<Frame> work;
  for (const auto& g : gens) {
    if (g.n() != k) throw DimensionError("generator size mismatch");
    work.push_back({g.x(), g.z()});
  }
  std::vector<PrepGate> gates;
  std::vector<int> pivot(k, -1);
  auto apply = [&](const PrepGate& g) {
    gates.push_back(g);
    for (auto& w : work) {
      if (g.kind == 'H') w.h(g.a);
      else if (g.kind == 'S') w.s(g.a);
      else w.controlled_pauli('Z', g.a, 'X', g.b);
    }
  };
  for (int i = 0; i < k; ++i) {
    Frame& g = work[i];
    for (int j = 0; j < i; ++j)
      if ((g.z >> pivot[j]) & 1u) g.z ^= std::uint64_t{1} << pivot[j];
    std::uint64_t support = g.x | g.z;
    if (!support) throw std::invalid_argument("generators are dependent");
    for (int q = 0; q < k; ++q) {
      if (!((support >> q) & 1u)) continue;
      bool x = (g.x >> q) & 1u, z = (g.z >> q) & 1u;
      if (x && z) apply({'S', q, 0});
      if (x) apply({'H', q, 0});
    }
    int p = __builtin_ctzll(support);
    for (int q = p + 1; q < k; ++q)
      if ((support >> q) & 1u) apply({'C', q, p});
    if (work[i].x != 0 || work[i].z != (std::uint64_t{1} << p)) throw std::logic_error("state prep reduction failed");
    pivot[i] = p;
  }
  auto build = [&](const std::vector<int>& flips) {
    Circuit c(n_total);
    for (int q = 0; q < k; ++q) c.prep(q);
    for (int q : flips) c.x(q);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
      if (it->kind == 'H') c.h(it->a);
      else if (it->kind == 'S') c.s(it->a);
      else c.cnot(it->a, it->b);
    }
    return c;
  };
  std::vector<int> flips;
  for (int i = 0; i < k; ++i) {
    Machine m(EngineKind::Clifford, n_total);
    ShotRecord rec;
    Rng rng(0);
    execute(build(flips), m, rec, rng);
    int e = static_cast<TableauEngine&>(*m.engine).expectation(gens[i].embed(n_total));
    if (e == 0) throw std::logic_error("state prep left a generator undetermined");
    if (e < 0) flips.push_back(pivot[i]);
  }
  return build(flips);
}

// ---------------------------------------------------------------- layout

SeLayout make_layout(AncillaLayout layout) {
  SeLayout l;
  if (layout == AncillaLayout::Full) {
    l.n_qubits = 19;
    l.dfs_anc = {10, 11, 12, 13, 14};
    l.round_anc = {{{15, 16}, {10, 11}}};
    l.round_flag = {{{17, 18}, {12, 13}}};
    l.unflagged_r_anc = {10, 11, 12, 13, 14};
    l.unflagged_s_anc = {15, 16, 17, 18};
  } else {
    l.n_qubits = 14;
    l.dfs_anc = {10, 10, 10, 10, 10};
    l.round_anc = {{{10, 11}, {10, 11}}};
    l.round_flag = {{{12, 13}, {12, 13}}};
    l.unflagged_r_anc = {10, 10, 10, 10, 10};
    l.unflagged_s_anc = {10, 10, 10, 10};
  }
  return l;
}

namespace {

void emit_dfs_se(Circuit& c, const std::array<int, 5>& anc, const std::string& reg) {
  for (int i = 0; i < 5; ++i) {
    c.prep(anc[i]);
    c.cnot(2 * i, anc[i]);
    c.cnot(2 * i + 1, anc[i]);
    c.measure('Z', anc[i], reg, i);
  }
}

std::vector<std::pair<char, int>> letters_of(const PauliString& p) {
  std::vector<std::pair<char, int>> out;
  for (int q = 0; q < p.n(); ++q)
    if (p.letter(q) != 'I') out.emplace_back(p.letter(q), q);
  return out;
}

void emit_unflagged_s(Circuit& c, const PauliString& stab, int anc, int bit) {
  c.prep(anc);
  for (auto [l, q] : letters_of(stab)) c.cp(l, q, 'X', anc);
  c.measure('Z', anc, "us", bit);
}

struct Step {
  enum Kind { PrepA, PrepF, Couple, Flag, MeasA, MeasF } kind;
  char letter = 'Z';
  int q = 0;
};

// Interleaved extraction of two checks; each check gets one flag opened after its first
// coupling and closed after its fifth.
std::array<std::vector<Step>, 2> round_steps(const std::array<PauliString, 2>& stabs, bool with_flags) {
  std::array<std::vector<Step>, 2> seqs;
  for (int j = 0; j < 2; ++j) {
    auto& s = seqs[j];
    if (with_flags) s.push_back({Step::PrepF});
    s.push_back({Step::PrepA});
    int k = 0;
    for (auto [l, q] : letters_of(stabs[j])) {
      s.push_back({Step::Couple, l, q});
      ++k;
      if (with_flags && (k == 1 || k == 5)) s.push_back({Step::Flag});
    }
    s.push_back({Step::MeasA});
    if (with_flags) s.push_back({Step::MeasF});
  }
  return seqs;
}

// Round-robin merge of the two step lists, `first` taking the lead in each turn.
std::vector<std::pair<int, Step>> interleave(const std::array<std::vector<Step>, 2>& seqs, int first) {
  std::vector<std::pair<int, Step>> out;
  std::array<std::size_t, 2> pos{0, 0};
  while (pos[0] < seqs[0].size() || pos[1] < seqs[1].size()) {
    for (int k = 0; k < 2; ++k) {
      int j = k == 0 ? first : 1 - first;
      if (pos[j] < seqs[j].size()) out.emplace_back(j, seqs[j][pos[j]++]);
    }
  }
  return out;
}

// Both checks are measured faithfully when the anticommuting overlaps are coupled in a
// consistent order: the number of such qubits where check 0 comes first must be even.
bool couplings_consistent(const std::vector<std::pair<int, Step>>& order, const std::array<PauliString, 2>& stabs) {
  std::array<int, 64> first_seen;
  first_seen.fill(-1);
  int leading = 0;
  for (const auto& [j, st] : order) {
    if (st.kind != Step::Couple) continue;
    if (first_seen[st.q] < 0) {
      first_seen[st.q] = j;
    } else if (first_seen[st.q] != j) {
      if (stabs[0].letter(st.q) != stabs[1].letter(st.q) && first_seen[st.q] == 0) ++leading;
    }
  }
  return leading % 2 == 0;
}

void emit_flagged_round(Circuit& c, const std::array<PauliString, 2>& stabs, const std::array<int, 2>& anc,
                        const std::array<int, 2>& flag, bool with_flags, const std::string& sreg,
                        const std::string& freg) {
  auto seqs = round_steps(stabs, with_flags);
  std::vector<std::pair<int, Step>> order;
  for (int first = 0; first < 2 && order.empty(); ++first) {
    auto candidate = interleave(seqs, first);
    if (couplings_consistent(candidate, stabs)) order = std::move(candidate);
  }
  if (order.empty()) throw ProtocolError("no consistent coupling order for a flagged round");
  for (const auto& [j, st] : order) {
    switch (st.kind) {
      case Step::PrepA: c.prep(anc[j]); break;
      case Step::PrepF: c.prep(flag[j]); break;
      case Step::Couple: c.cp(st.letter, st.q, 'X', anc[j]); break;
      case Step::Flag: c.cp('X', anc[j], 'X', flag[j]); break;
      case Step::MeasA: c.measure('Z', anc[j], sreg, j); break;
      case Step::MeasF: c.measure('Z', flag[j], freg, j); break;
    }
  }
}

std::vector<int> data_qubits() {
  std::vector<int> q(10);
  for (int i = 0; i < 10; ++i) q[i] = i;
  return q;
}

}  // namespace

SeCircuits synthesize_se_circuits(const CodeSpec& code, const ProtocolOptions& opt) {
  if (code.name != "[[10,1,4]]" || code.stabilizers.size() != 9)
    throw std::invalid_argument("syndrome extraction is synthesized for [[10,1,4]] only");
  SeCircuits se;
  se.layout = make_layout(opt.layout);
  se.flags = opt.flags;
  const int n = se.layout.n_qubits;
  se.dfs_se = Circuit(n);
  se.dfs_se.add_register("dfs", 5);
  emit_dfs_se(se.dfs_se, se.layout.dfs_anc, "dfs");
  for (int r = 0; r < 2; ++r) {
    Circuit c(n);
    std::string sreg = "f" + std::to_string(r + 1) + "s", freg = "f" + std::to_string(r + 1) + "f";
    c.add_register(sreg, 2);
    c.add_register(freg, 2);
    std::array<PauliString, 2> stabs = {code.stabilizers[5 + 2 * r], code.stabilizers[6 + 2 * r]};
    emit_flagged_round(c, stabs, se.layout.round_anc[r], se.layout.round_flag[r], opt.flags, sreg, freg);
    se.flagged[r] = std::move(c);
  }
  se.unflagged = Circuit(n);
  se.unflagged.add_register("ur", 5);
  se.unflagged.add_register("us", 4);
  emit_dfs_se(se.unflagged, se.layout.unflagged_r_anc, "ur");
  for (int j = 0; j < 4; ++j) {
    emit_unflagged_s(se.unflagged, code.stabilizers[5 + j], se.layout.unflagged_s_anc[j], j);
    Circuit single(n);
    single.add_register("us", 4);
    emit_unflagged_s(single, code.stabilizers[5 + j], se.layout.unflagged_s_anc[j], j);
    se.unflagged_s[j] = std::move(single);
  }
  return se;
}

Circuit build_qec_cycle_circuit(const SeCircuits& se, double idle_duration) {
  Circuit c(se.layout.n_qubits);
  c.add_register("leak", 10);
  c.add_register("dfs", 5);
  c.add_register("f1s", 2);
  c.add_register("f1f", 2);
  c.add_register("f2s", 2);
  c.add_register("f2f", 2);
  c.add_register("ur", 5);
  c.add_register("us", 4);
  if (idle_duration > 0) c.idle(data_qubits(), idle_duration);
  for (int q = 0; q < 10; ++q) c.leak_detect(q, "leak", q);
  c.append(se.dfs_se);
  Predicate dfs_clean{Predicate::Kind::AllEqual, {c.term("dfs", 0x1F)}};
  c.begin_if(dfs_clean);
  c.append(se.flagged[0]);
  c.begin_if({Predicate::Kind::AllEqual, {c.term("f1s", 0), c.term("f1f", 0)}});
  c.append(se.flagged[1]);
  c.end_if();
  c.end_if();
  c.begin_if({Predicate::Kind::AnyDiffers,
              {c.term("dfs", 0x1F), c.term("f1s", 0), c.term("f1f", 0), c.term("f2s", 0), c.term("f2f", 0)}});
  c.append(se.unflagged);
  c.end_if();
  c.barrier(data_qubits());
  c.validate();
  return c;
}

// -------------------------------------------------------------- hook table

namespace {

Machine codeword_machine(const Circuit& init, int n) {
  Machine m(EngineKind::Clifford, n, true);
  ShotRecord rec;
  Rng rng(7);
  execute(init, m, rec, rng);
  m.frame = Frame{};
  return m;
}

std::uint16_t syndrome9_of(const PauliString& e, const CodeSpec& code) {
  return static_cast<std::uint16_t>(syndrome_of(e, code.stabilizers).bits());
}

}  // namespace

HookTableBuild build_hook_table(const SeCircuits& se, const CodeSpec& code) {
  HookTableBuild b;
  b.table = std::make_shared<HookTable>();
  std::vector<PauliString> gens = code.stabilizers;
  gens.push_back(code.logical_z);
  const int n = se.layout.n_qubits;
  Machine base = codeword_machine(synthesize_state_prep(gens, n), n);
  for (int r = 0; r < 2; ++r) {
    const Circuit& round = se.flagged[r];
    const int freg = round.require_register("f" + std::to_string(r + 1) + "f");
    for (const auto& f : enumerate_fault_locations(round)) {
      ++b.faults_enumerated;
      Machine m = base;
      ShotRecord rec;
      Rng rng(11);
      ExecOptions opt;
      opt.faults = std::span<const FaultLocation>(&f, 1);
      execute(round, m, rec, rng, opt);
      PauliString e = m.frame.restricted(10);
      std::uint8_t flags = se.flags ? static_cast<std::uint8_t>(rec.registers[freg] << (2 * r)) : 0;
      if (flags) {
        ++b.flagged_faults;
        auto ins = b.table->add(flags, syndrome9_of(e, code), e, code);
        if (ins.inserted) ++b.entries_per_round[r];
        if (ins.conflict) ++b.conflicts;
      } else if (reduced_weight(e, code) > 1) {
        ++b.unflagged_high_weight;
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------- protocol

QecProtocol::QecProtocol(ProtocolOptions opt) : opt_(opt), code_(build_1014()) {
  se_ = synthesize_se_circuits(code_, opt_);
  hooks_ = build_hook_table(se_, code_);
  if (hooks_.conflicts) throw ProtocolError("flag lookup table has conflicting entries");
  std::shared_ptr<const HookTable> table = opt_.flags ? hooks_.table : nullptr;
  decoder_ = std::make_unique<Decoder>(code_, table);
  const int n = num_qubits();
  auto gens_with = [&](PauliString extra) {
    std::vector<PauliString> g = code_.stabilizers;
    g.push_back(std::move(extra));
    return g;
  };
  base_init_[0] = synthesize_state_prep(gens_with(code_.logical_z), n);
  base_init_[1] = synthesize_state_prep(gens_with(PauliString(code_.logical_x).negate()), n);
  base_init_[2] = synthesize_state_prep(gens_with(PauliString(code_.logical_y).negate()), n);
}

double QecProtocol::se_duration(const NoiseConfig& cfg) const {
  double t = 0;
  auto add = [&](const Circuit& c) {
    for (const auto& ins : c.instructions()) {
      if (ins.op == Op::CP) t += cfg.t_gate2;
      else if (ins.op == Op::Measure) t += cfg.t_meas;
      else if (ins.op != Op::Barrier && ins.op != Op::Idle && ins.op != Op::If) t += cfg.t_gate1;
    }
  };
  add(se_.dfs_se);
  add(se_.flagged[0]);
  add(se_.flagged[1]);
  return t;
}

const Circuit& QecProtocol::cycle_circuit(double idle) const {
  std::lock_guard<std::mutex> lock(cycles_mutex_);
  for (const auto& [d, c] : cycles_)
    if (d == idle) return *c;
  cycles_.emplace_back(idle, std::make_shared<Circuit>(build_qec_cycle_circuit(se_, idle)));
  return *cycles_.back().second;
}

const PauliString& QecProtocol::logical(char basis) const {
  if (basis == 'X') return code_.logical_x;
  if (basis == 'Y') return code_.logical_y;
  if (basis == 'Z') return code_.logical_z;
  throw std::invalid_argument("bad logical basis");
}

Circuit QecProtocol::init_circuit(LogicalState s) const {
  Circuit c = base_init_[state_basis(s) == 'Z' ? 0 : state_basis(s) == 'X' ? 1 : 2];
  const PauliString* flip = nullptr;
  if (s == LogicalState::One || s == LogicalState::PlusI) flip = &code_.logical_x;
  else if (s == LogicalState::Plus) flip = &code_.logical_z;
  if (flip)
    for (int q = 0; q < 10; ++q) c.pauli(flip->letter(q), q);
  return c;
}

Circuit QecProtocol::readout_circuit(char basis) const {
  const PauliString& l = logical(basis);
  Circuit c(num_qubits());
  c.add_register("out", 10);
  for (int q = 0; q < 10; ++q)
    if (l.letter(q) != 'I') c.measure(l.letter(q), q, "out", q);
  return c;
}

int QecProtocol::readout_parity(const Circuit& readout, const ShotRecord& rec, char basis) const {
  const PauliString& l = logical(basis);
  return parity64(rec.value(readout, "out") & (l.x() | l.z())) ^ (l.phase() == 2 ? 1 : 0);
}

SyndromeRecord QecProtocol::record_from(const Circuit& cycle, const ShotRecord& rec) const {
  SyndromeRecord out;
  out.leak_detected = static_cast<std::uint16_t>(rec.value(cycle, "leak"));
  out.unflagged_taken = rec.was_written(cycle, "us");
  out.flag_count = se_.flags ? 4 : 0;
  out.flags = static_cast<std::uint8_t>(rec.value(cycle, "f1f") | (rec.value(cycle, "f2f") << 2));
  if (out.unflagged_taken) {
    out.r = static_cast<std::uint8_t>(rec.value(cycle, "ur") ^ 0x1Fu);
    out.s = static_cast<std::uint8_t>(rec.value(cycle, "us"));
  } else {
    out.r = static_cast<std::uint8_t>(rec.value(cycle, "dfs") ^ 0x1Fu);
    out.s = static_cast<std::uint8_t>(rec.value(cycle, "f1s") | (rec.value(cycle, "f2s") << 2));
  }
  return out;
}

QecProtocol::CycleResult QecProtocol::qec_cycle(Machine& m, const Circuit& cycle, const ShotNoise* noise,
                                                Rng& noise_rng, Rng& tie_rng,
                                                std::span<const FaultLocation> faults) const {
  ShotRecord rec;
  ExecOptions opt;
  opt.noise = noise;
  opt.faults = faults;
  execute(cycle, m, rec, noise_rng, opt);
  CycleResult res;
  res.record = record_from(cycle, rec);
  res.outcome = decoder_->decode_full(res.record, DecodeMode::Correct, tie_rng);
  res.postselect = decoder_->decode_full(res.record, DecodeMode::PostSelect, tie_rng);
  if (!res.outcome.correction.is_identity()) m.inject(res.outcome.correction);
  return res;
}

Machine QecProtocol::prepared_codeword(LogicalState s) const { return codeword_machine(init_circuit(s), num_qubits()); }

// --------------------------------------------------------------- fault scan

namespace {

void mark_executed(const std::vector<Instruction>& block, const std::vector<std::uint64_t>& regs, std::size_t& index,
                   bool active, std::vector<std::uint8_t>& out) {
  for (const auto& ins : block) {
    out[index++] = active;
    if (ins.op == Op::If) mark_executed(ins.body, regs, index, active && ins.pred.eval(regs), out);
  }
}

bool codespace_ok(const Machine& m, const CodeSpec& code) {
  const auto& t = static_cast<const TableauEngine&>(*m.engine);
  for (const auto& g : code.stabilizers)
    if (t.expectation(g.embed(m.num_qubits())) != 1) return false;
  return true;
}

}  // namespace

FaultScanReport fault_scan(const QecProtocol& p, const FaultScanOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  FaultScanReport rep;
  const CodeSpec& code = p.code();
  rep.hook_conflicts = p.hook_build().conflicts;
  rep.hook_entries = p.hook_build().table->size();
  const Circuit& cycle = p.cycle_circuit(opt.idle_duration);
  const Machine zero = p.prepared_codeword(LogicalState::Zero);
  auto note = [&](const std::string& s) {
    if (rep.details.size() < opt.max_reported) rep.details.push_back(s);
  };
  std::uint64_t run_id = 0;
  auto run_cycle = [&](Machine& m, std::span<const FaultLocation> faults) {
    Rng nr = make_rng(derive_seed(opt.seed, {kNoiseStream, run_id}));
    Rng tr = make_rng(derive_seed(opt.seed, {kTieBreakStream, run_id}));
    ++run_id;
    return p.qec_cycle(m, cycle, nullptr, nr, tr, faults);
  };

  // (a) every syndrome class returns to the codespace
  for (std::uint16_t syn = 0; syn < 512; ++syn) {
    PauliString e = brute_force_min_weight(SyndromeVector(9, syn), code).front();
    Machine m = zero;
    m.inject(e);
    run_cycle(m, {});
    if (!codespace_ok(m, code)) {
      rep.condition_a = false;
      note("condition (a): input " + e.str() + " leaves the codespace");
    }
  }
  // (b) no error or a weight-1 error is corrected exactly
  std::vector<PauliString> inputs{PauliString(10)};
  for (int w = 1; w <= 1; ++w)
    for_each_pauli_of_weight(10, w, PauliClass::Any, [&](const PauliString& e) { inputs.push_back(e); });
  for (const auto& e : inputs) {
    Machine m = zero;
    m.inject(e);
    run_cycle(m, {});
    PauliString residual = m.frame.restricted(10);
    if (!in_stabilizer_group(residual, code) || !codespace_ok(m, code)) {
      rep.condition_b = false;
      note("condition (b): input " + e.str() + " leaves residual " + residual.str());
    }
  }
  // (c) single faults on a clean input leave at most a weight-1 error
  ShotRecord clean;
  {
    Machine m = zero;
    Rng rng(3);
    execute(cycle, m, clean, rng);
  }
  std::vector<std::uint8_t> executed(cycle.instruction_count(), 0);
  std::size_t idx = 0;
  mark_executed(cycle.instructions(), clean.registers, idx, true, executed);
  auto locations = enumerate_fault_locations(cycle);
  rep.locations = locations.size();
  for (const auto& f : locations) {
    if (executed[f.instruction]) ++rep.active_locations;
    Machine m = zero;
    run_cycle(m, std::span<const FaultLocation>(&f, 1));
    PauliString residual = m.frame.restricted(10);
    int w = reduced_weight(residual, code);
    if (w > 1) {
      ++rep.violations;
      note("condition (c): fault " + f.describe() + " leaves " + residual.str() + " (reduced weight " +
           std::to_string(w) + ")");
    }
    if (is_nontrivial_logical(residual, code)) ++rep.logical_failures;
  }
  // sampled fault pairs, informational
  if (opt.two_fault_samples > 0 && !locations.empty()) {
    Rng pick = make_rng(derive_seed(opt.seed, {kSyntheticStream}));
    std::uniform_int_distribution<std::size_t> d(0, locations.size() - 1);
    for (std::size_t i = 0; i < opt.two_fault_samples; ++i) {
      std::array<FaultLocation, 2> pair = {locations[d(pick)], locations[d(pick)]};
      Machine m = zero;
      run_cycle(m, pair);
      // a second cycle with no faults settles any remaining weight-1 error
      run_cycle(m, {});
      ++rep.two_fault_runs;
      PauliString residual = m.frame.restricted(10);
      if (is_nontrivial_logical(residual, code) || !in_stabilizer_group(residual, code)) ++rep.two_fault_failures;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace dfsqec
