#include <gtest/gtest.h>

#include "dfsqec/executor.hpp"
#include "dfsqec/protocol.hpp"
#include "dfsqec/rng.hpp"

using namespace dfsqec;

namespace {

const QecProtocol& protocol() {
  static QecProtocol p;
  return p;
}

PauliString random_data_pauli(std::mt19937_64& rng) {
  PauliString p(10);
  for (int q = 0; q < 10; ++q) p.set(q, "IXYZ"[rng() % 4]);
  return p;
}

std::uint64_t run_on_codeword(const Circuit& c, const PauliString& error, const std::string& reg) {
  Machine m = protocol().prepared_codeword(LogicalState::Zero);
  m.inject(error.embed(m.num_qubits()));
  ShotRecord rec;
  Rng rng(1);
  execute(c, m, rec, rng);
  return rec.value(c, reg);
}

}  // namespace

TEST(Protocol, StateNames) {
  for (auto s : all_states()) {
    EXPECT_EQ(parse_state(state_name(s)), s);
    EXPECT_EQ(orthogonal_state(orthogonal_state(s)), s);
    EXPECT_EQ(state_basis(orthogonal_state(s)), state_basis(s));
    EXPECT_NE(state_is_negative(orthogonal_state(s)), state_is_negative(s));
  }
  EXPECT_THROW(parse_state("2"), std::invalid_argument);
}

TEST(Protocol, DfsSeRawBitsAreOneWithoutErrors) {
  EXPECT_EQ(run_on_codeword(protocol().se().dfs_se, PauliString(10), "dfs"), 0x1Fu);
  EXPECT_EQ(run_on_codeword(protocol().se().dfs_se, PauliString::parse("X4", 10), "dfs"), 0x1Fu ^ (1u << 2));
}

TEST(Protocol, UnflaggedLaddersMeasureTheirChecks) {
  const CodeSpec& c = protocol().code();
  EXPECT_EQ(c.stabilizers[5].str(), "X0X1Z2Z4X6X7");
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    PauliString e = random_data_pauli(rng);
    for (int j = 0; j < 4; ++j) {
      std::uint64_t got = run_on_codeword(protocol().se().unflagged_s[j], e, "us");
      EXPECT_EQ((got >> j) & 1u, commutes(e, c.stabilizers[5 + j]) ? 0u : 1u) << e.str() << " s" << j;
    }
    std::uint64_t all = run_on_codeword(protocol().se().unflagged, e, "us");
    std::uint64_t r = run_on_codeword(protocol().se().unflagged, e, "ur") ^ 0x1Fu;
    const std::uint64_t syn = syndrome_of(e, c.stabilizers).bits();
    EXPECT_EQ(all, syn >> 5);
    EXPECT_EQ(r, syn & 0x1Fu);
  }
}

TEST(Protocol, FlaggedRoundsCoverTheirChecks) {
  const CodeSpec& c = protocol().code();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    PauliString e = random_data_pauli(rng);
    auto syn = syndrome_of(e, c.stabilizers);
    std::uint64_t r1 = run_on_codeword(protocol().se().flagged[0], e, "f1s");
    std::uint64_t r2 = run_on_codeword(protocol().se().flagged[1], e, "f2s");
    EXPECT_EQ(r1, (syn.bits() >> 5) & 3u) << e.str();
    EXPECT_EQ(r2, (syn.bits() >> 7) & 3u) << e.str();
    EXPECT_EQ(run_on_codeword(protocol().se().flagged[0], e, "f1f"), 0u);
    EXPECT_EQ(run_on_codeword(protocol().se().flagged[1], e, "f2f"), 0u);
  }
}

TEST(Protocol, NoiselessCycleIsTrivial) {
  const QecProtocol& p = protocol();
  for (auto s : all_states()) {
    Machine m = p.prepared_codeword(s);
    Rng a(1), b(2);
    auto res = p.qec_cycle(m, p.cycle_circuit(1.0), nullptr, a, b);
    EXPECT_EQ(res.record.syndrome9(), 0u);
    EXPECT_FALSE(res.record.unflagged_taken);
    EXPECT_TRUE(res.outcome.correction.is_identity());
    auto& t = static_cast<TableauEngine&>(*m.engine);
    EXPECT_EQ(t.expectation(p.logical(state_basis(s)).embed(p.num_qubits())), state_is_negative(s) ? -1 : 1);
  }
}

TEST(Protocol, SingleDataErrorsAreCorrected) {
  const QecProtocol& p = protocol();
  for (int q = 0; q < 10; ++q)
    for (char l : {'X', 'Y', 'Z'}) {
      Machine m = p.prepared_codeword(LogicalState::Plus);
      m.inject(PauliString::single(p.num_qubits(), q, l));
      Rng a(1), b(2);
      auto res = p.qec_cycle(m, p.cycle_circuit(1.0), nullptr, a, b);
      EXPECT_TRUE(res.record.unflagged_taken);
      if (l != 'Z') {
        EXPECT_EQ(res.record.r, 1u << (q / 2));
      }
      auto& t = static_cast<TableauEngine&>(*m.engine);
      for (const auto& g : p.code().stabilizers) EXPECT_EQ(t.expectation(g.embed(p.num_qubits())), 1);
      EXPECT_EQ(t.expectation(p.logical('X').embed(p.num_qubits())), 1) << l << q;
    }
}

TEST(Protocol, FaultScanCertifiesTheCycle) {
  FaultScanReport r = fault_scan(protocol());
  EXPECT_EQ(r.locations, 1258u);
  EXPECT_GT(r.active_locations, 0u);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.logical_failures, 0u);
  EXPECT_TRUE(r.condition_a);
  EXPECT_TRUE(r.condition_b);
  EXPECT_EQ(r.hook_conflicts, 0u);
  EXPECT_TRUE(r.ok());
}

TEST(Protocol, CompactLayoutIsFaultTolerant) {
  QecProtocol compact(ProtocolOptions{true, AncillaLayout::Compact});
  EXPECT_LE(compact.num_qubits(), StateVectorEngine::kDefaultCap);
  EXPECT_TRUE(fault_scan(compact).ok());
}

TEST(Protocol, DeflaggedCycleViolates) {
  QecProtocol bare(ProtocolOptions{false, AncillaLayout::Full});
  FaultScanReport r = fault_scan(bare);
  EXPECT_GT(r.violations, 0u);
  EXPECT_FALSE(r.ok());
}

TEST(Protocol, TwoFaultSamplingIsReported) {
  FaultScanOptions o;
  o.two_fault_samples = 300;
  o.seed = 9;
  FaultScanReport a = fault_scan(protocol(), o), b = fault_scan(protocol(), o);
  EXPECT_EQ(a.two_fault_runs, 300u);
  EXPECT_EQ(a.two_fault_failures, b.two_fault_failures);
}

TEST(Protocol, StatePrepSynthesisRejectsBadInput) {
  std::vector<PauliString> anti = {PauliString::parse("X0", 1), PauliString::parse("Z0", 1)};
  EXPECT_THROW(synthesize_state_prep(anti, 1), std::invalid_argument);
  std::vector<PauliString> bell = {PauliString::parse("X0X1", 2), PauliString::parse("-Z0Z1", 2)};
  Circuit c = synthesize_state_prep(bell, 3);
  Machine m(EngineKind::Clifford, 3);
  ShotRecord rec;
  Rng rng(1);
  execute(c, m, rec, rng);
  auto& t = static_cast<TableauEngine&>(*m.engine);
  EXPECT_EQ(t.expectation(PauliString::parse("X0X1", 3)), 1);
  EXPECT_EQ(t.expectation(PauliString::parse("-Z0Z1", 3)), 1);
}
