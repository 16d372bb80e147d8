#include "dfsqec/executor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dfsqec/rng.hpp"

namespace dfsqec {

std::string FaultLocation::describe() const {
  std::ostringstream os;
  os << "#" << instruction << ' ';
  if (kind == Kind::MeasureFlip) os << "measurement flip";
  else os << pauli.str();
  return os.str();
}

Machine::Machine(EngineKind kind, int n, bool track)
    : engine(make_engine(kind, n)), leaked(n, 0), track_frame(track) {}

Machine::Machine(const Machine& o)
    : engine(o.engine ? o.engine->clone() : nullptr), leaked(o.leaked), track_frame(o.track_frame), frame(o.frame) {}

Machine& Machine::operator=(const Machine& o) {
  if (this != &o) {
    engine = o.engine ? o.engine->clone() : nullptr;
    leaked = o.leaked;
    track_frame = o.track_frame;
    frame = o.frame;
  }
  return *this;
}

void Machine::inject(const PauliString& p) {
  PauliString e = p.embed(num_qubits());
  engine->apply_pauli(e);
  if (track_frame) frame.multiply(e);
}

namespace {

class Runner {
 public:
  Runner(Machine& m, ShotRecord& rec, Rng& rng, const ExecOptions& opt, int n)
      : m_(m), rec_(rec), rng_(rng), opt_(opt), n_(n) {}

  void walk(const std::vector<Instruction>& block) {
    for (const auto& ins : block) {
      const std::size_t idx = index_++;
      if (ins.op == Op::If) {
        if (ins.pred.eval(rec_.registers)) walk(ins.body);
        else index_ += count_instructions(ins.body);
        continue;
      }
      step(ins, idx);
    }
  }

 private:
  bool leaked(int q) const { return m_.leaked[q] != 0; }

  void inject_letter(int q, char l) {
    if (l == 'I') return;
    m_.inject(PauliString::single(n_, q, l));
  }

  void apply_faults(std::size_t idx, bool& flip) {
    for (const auto& f : opt_.faults) {
      if (f.instruction != idx) continue;
      if (f.kind == FaultLocation::Kind::MeasureFlip) flip = !flip;
      else m_.inject(f.pauli);
    }
  }

  void record(const Instruction& ins, bool value) {
    auto& r = rec_.registers[ins.target.reg];
    std::uint64_t b = std::uint64_t{1} << ins.target.bit;
    r = value ? (r | b) : (r & ~b);
    rec_.written[ins.target.reg] = 1;
  }

  void step(const Instruction& ins, std::size_t idx) {
    Engine& e = *m_.engine;
    const ShotNoise* noise = opt_.noise;
    bool flip = false;
    switch (ins.op) {
      case Op::H:
      case Op::S:
      case Op::Sdg:
      case Op::X:
      case Op::Y:
      case Op::Z:
      case Op::RZ: {
        int q = ins.qubits[0];
        if (!leaked(q)) {
          switch (ins.op) {
            case Op::H:
              e.h(q);
              if (m_.track_frame) m_.frame.h(q);
              break;
            case Op::S:
              e.s(q);
              if (m_.track_frame) m_.frame.s(q);
              break;
            case Op::Sdg:
              e.sdg(q);
              if (m_.track_frame) m_.frame.s(q);
              break;
            case Op::RZ: {
              e.rz(q, ins.param);
              if (m_.track_frame) {
                long long k = std::llround(ins.param / (std::numbers::pi / 2));
                if (k % 2 != 0) m_.frame.s(q);
              }
              break;
            }
            default:
              e.pauli(q, "XYZ"[static_cast<int>(ins.op) - static_cast<int>(Op::X)]);
              break;
          }
          if (noise) inject_letter(q, noise->sample_depolarize1(rng_));
        }
        break;
      }
      case Op::CP: {
        int c = ins.qubits[0], t = ins.qubits[1];
        if (!leaked(c) && !leaked(t)) {
          e.controlled_pauli(ins.pc, c, ins.pt, t);
          if (m_.track_frame) m_.frame.controlled_pauli(ins.pc, c, ins.pt, t);
          if (noise) {
            auto [a, b] = noise->sample_depolarize2(rng_);
            inject_letter(c, a);
            inject_letter(t, b);
          }
        }
        break;
      }
      case Op::Prep:
      case Op::Reset: {
        int q = ins.qubits[0];
        if (!leaked(q)) {
          e.reset(q, rng_);
          if (m_.track_frame) m_.frame.clear(q);
          if (noise && noise->sample_prep_flip(rng_)) inject_letter(q, 'X');
        }
        break;
      }
      case Op::Measure: {
        int q = ins.qubits[0];
        bool outcome = true;
        if (!leaked(q)) {
          outcome = e.measure(ins.pc, q, rng_);
          if (m_.track_frame) {
            // the component along the basis is absorbed by the collapse
            char keep = ins.pc == 'Z' ? 'X' : 'Z';
            std::uint64_t b = std::uint64_t{1} << q;
            bool anti = m_.frame.flips(ins.pc, q);
            m_.frame.clear(q);
            if (anti) {
              if (keep == 'X') m_.frame.x |= b;
              else m_.frame.z |= b;
            }
          }
          if (noise && noise->sample_meas_flip(rng_)) flip = !flip;
        }
        apply_faults(idx, flip);
        record(ins, outcome != flip);
        return;
      }
      case Op::LeakDetect: {
        int q = ins.qubits[0];
        bool was = leaked(q);
        if (was) {
          m_.leaked[q] = 0;
          e.reset(q, rng_);
          if (m_.track_frame) m_.frame.clear(q);
        }
        record(ins, was);
        break;
      }
      case Op::Idle:
        idle(ins);
        break;
      case Op::Barrier:
        break;
      case Op::If:
        break;
    }
    apply_faults(idx, flip);
  }

  void idle(const Instruction& ins) {
    const ShotNoise* noise = opt_.noise;
    if (!noise) return;
    const double t = ins.param;
    Engine& e = *m_.engine;
    const auto& zones = noise->zones();
    const bool has_quasi = noise->config().effective_Gamma() > 0;
    if (has_quasi && t > 0) {
      if (e.kind() == EngineKind::StateVector) {
        for (int q : ins.qubits)
          if (!leaked(q)) e.rz(q, noise->idle_angle(q, t));
      } else {
        if (!noise->config().twirl_quasi_static)
          throw CapabilityError("coherent quasi-static dephasing needs the state-vector engine");
        std::vector<std::uint8_t> in(n_, 0);
        for (int q : ins.qubits) in[q] = 1;
        for (int q : ins.qubits) {
          if (leaked(q)) continue;
          int p = q < zones.num_qubits() ? zones.partner(q) : -1;
          double prob;
          if (zones.encoded_pairs() && p >= 0 && in[p] && !leaked(p)) {
            if (p < q) continue;
            double d = noise->idle_angle(q, t) - noise->idle_angle(p, t);
            prob = std::pow(std::sin(d / 2), 2);
          } else {
            prob = std::pow(std::sin(noise->idle_angle(q, t) / 2), 2);
          }
          if (ShotNoise::bernoulli(prob, rng_)) inject_letter(q, 'Z');
        }
      }
    }
    const double pz = noise->idle_z_probability(t);
    for (int q : ins.qubits) {
      if (leaked(q)) continue;
      if (ShotNoise::bernoulli(pz, rng_)) inject_letter(q, 'Z');
      if (noise->sample_leak(rng_)) m_.leaked[q] = 1;
    }
  }

  Machine& m_;
  ShotRecord& rec_;
  Rng& rng_;
  const ExecOptions& opt_;
  int n_;
  std::size_t index_ = 0;
};

}  // namespace

void execute(const Circuit& circuit, Machine& m, ShotRecord& rec, Rng& rng, const ExecOptions& opt) {
  if (!m.engine) throw std::logic_error("machine has no engine");
  if (circuit.num_qubits() > m.num_qubits()) throw CircuitError("circuit needs more qubits than the machine has");
  rec.registers.assign(circuit.registers().size(), 0);
  rec.written.assign(circuit.registers().size(), 0);
  if (static_cast<int>(m.leaked.size()) != m.num_qubits()) m.leaked.assign(m.num_qubits(), 0);
  Runner r(m, rec, rng, opt, m.num_qubits());
  r.walk(circuit.instructions());
  rec.leaked = m.leaked;
  if (m.track_frame) rec.frame = m.frame;
}

ShotRecord run(const Circuit& circuit, EngineKind engine, const NoiseConfig& noise, std::uint64_t seed) {
  circuit.validate();
  noise.validate();
  const int n = circuit.num_qubits();
  Machine m(engine, n);
  Rng rng = make_rng(derive_seed(seed, {kNoiseStream}));
  ShotRecord rec;
  rec.seed = seed;
  ExecOptions opt;
  std::optional<ShotNoise> sn;
  if (!noise.is_noiseless()) {
    auto zones = ZoneAssignment::standard(n, n - n % 2, noise, false);
    Rng zr = make_rng(derive_seed(seed, {kZoneStream}));
    sn.emplace(noise, zones, sample_quasi_static(noise, zones, zr));
    opt.noise = &*sn;
  }
  execute(circuit, m, rec, rng, opt);
  rec.seed = seed;
  return rec;
}

std::vector<FaultLocation> enumerate_fault_locations(const Circuit& circuit) {
  std::vector<FaultLocation> out;
  const int n = circuit.num_qubits();
  std::size_t index = 0;
  auto add1 = [&](std::size_t idx, int q) {
    for (char l : {'X', 'Y', 'Z'}) out.push_back({idx, FaultLocation::Kind::Pauli, PauliString::single(n, q, l)});
  };
  auto walk = [&](auto&& self, const std::vector<Instruction>& block) -> void {
    for (const auto& ins : block) {
      const std::size_t idx = index++;
      switch (ins.op) {
        case Op::If:
          self(self, ins.body);
          break;
        case Op::CP:
          for (int k = 1; k < 16; ++k) {
            PauliString p(n);
            p.set(ins.qubits[0], "IXYZ"[k / 4]);
            p.set(ins.qubits[1], "IXYZ"[k % 4]);
            out.push_back({idx, FaultLocation::Kind::Pauli, p});
          }
          break;
        case Op::Measure:
          out.push_back({idx, FaultLocation::Kind::MeasureFlip, PauliString(n)});
          break;
        case Op::Idle:
          for (int q : ins.qubits) add1(idx, q);
          break;
        case Op::LeakDetect:
        case Op::Barrier:
          break;
        default:
          add1(idx, ins.qubits[0]);
          break;
      }
    }
  };
  walk(walk, circuit.instructions());
  return out;
}

ShotRecord run_with_fault(const Circuit& circuit, const FaultLocation& fault, std::uint64_t seed) {
  circuit.validate();
  if (fault.instruction >= circuit.instruction_count()) throw std::out_of_range("fault location beyond circuit");
  if (fault.kind == FaultLocation::Kind::Pauli && fault.pauli.n() != circuit.num_qubits())
    throw std::invalid_argument("fault Pauli size does not match circuit");
  Machine m(EngineKind::Clifford, circuit.num_qubits(), true);
  Rng rng = make_rng(derive_seed(seed, {kNoiseStream}));
  ShotRecord rec;
  ExecOptions opt;
  opt.faults = std::span<const FaultLocation>(&fault, 1);
  execute(circuit, m, rec, rng, opt);
  rec.seed = seed;
  return rec;
}

std::string shot_csv_header(const Circuit& circuit) {
  std::string h = "seed";
  for (const auto& r : circuit.registers()) h += "," + r.name;
  return h + ",leak";
}

std::string shot_csv_row(const Circuit& circuit, const ShotRecord& rec) {
  std::string row = std::to_string(rec.seed);
  for (std::size_t i = 0; i < circuit.registers().size(); ++i)
    row += "," + bits_to_string(rec.registers[i], circuit.registers()[i].size);
  row += ",";
  for (auto l : rec.leaked) row += l ? '1' : '0';
  return row;
}

}  // namespace dfsqec
