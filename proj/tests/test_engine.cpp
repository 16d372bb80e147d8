#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "dfsqec/executor.hpp"
#include "dfsqec/protocol.hpp"
#include "dfsqec/rng.hpp"

using namespace dfsqec;

namespace {

double chi2_two_sample(const std::map<std::uint64_t, int>& a, const std::map<std::uint64_t, int>& b, int& bins) {
  std::map<std::uint64_t, std::pair<int, int>> all;
  for (auto [k, v] : a) all[k].first = v;
  for (auto [k, v] : b) all[k].second = v;
  double chi2 = 0;
  bins = 0;
  for (auto [k, v] : all) {
    double s = v.first + v.second;
    if (s == 0) continue;
    chi2 += (v.first - v.second) * double(v.first - v.second) / s;
    ++bins;
  }
  return chi2;
}

}  // namespace

TEST(Engine, HadamardMeasurementIsFair) {
  Circuit c(1);
  c.add_register("m", 1);
  c.h(0).measure('Z', 0, "m", 0);
  for (auto kind : {EngineKind::Clifford, EngineKind::StateVector}) {
    int ones = 0;
    const int N = 10000;
    for (int s = 0; s < N; ++s) ones += static_cast<int>(run(c, kind, NoiseConfig{}, s).value(c, "m"));
    EXPECT_NEAR(ones / double(N), 0.5, 5 * 0.005);
  }
}

TEST(Engine, EncodedZeroHasTrivialSyndromes) {
  QecProtocol p;
  for (auto s : all_states()) {
    Machine m = p.prepared_codeword(s);
    auto& t = static_cast<TableauEngine&>(*m.engine);
    for (const auto& g : p.code().stabilizers) EXPECT_EQ(t.expectation(g.embed(p.num_qubits())), 1) << state_name(s);
    PauliString L = p.logical(state_basis(s)).embed(p.num_qubits());
    EXPECT_EQ(t.expectation(L), state_is_negative(s) ? -1 : 1) << state_name(s);
  }
}

TEST(Engine, EncodedStateVectorMatchesTableau) {
  QecProtocol p(ProtocolOptions{true, AncillaLayout::Compact});
  for (auto s : {LogicalState::Zero, LogicalState::Minus, LogicalState::MinusI, LogicalState::PlusI}) {
    Machine m(EngineKind::StateVector, p.num_qubits());
    ShotRecord rec;
    Rng rng(1);
    execute(p.init_circuit(s), m, rec, rng);
    auto& sv = static_cast<StateVectorEngine&>(*m.engine);
    for (const auto& g : p.code().stabilizers) EXPECT_NEAR(sv.expectation(g.embed(p.num_qubits())), 1.0, 1e-10);
    PauliString L = p.logical(state_basis(s)).embed(p.num_qubits());
    EXPECT_NEAR(sv.expectation(L), state_is_negative(s) ? -1.0 : 1.0, 1e-10) << state_name(s);
  }
}

TEST(Engine, AgreementUnderPauliNoise) {
  Circuit c(5);
  c.add_register("m", 5);
  c.h(0).cnot(0, 1).s(1).cp('X', 1, 'Z', 2).h(3).cz(3, 4).cnot(2, 4).sdg(0).h(0);
  c.measure('Z', 0, "m", 0).measure('X', 1, "m", 1).measure('Y', 2, "m", 2).measure('Z', 3, "m", 3).measure('Z', 4, "m", 4);
  NoiseConfig n;
  n.p1 = 0.02;
  n.p2 = 0.05;
  n.p_meas = 0.02;
  n.p_spam_extra = 0.01;
  std::map<std::uint64_t, int> a, b;
  const int N = 10000;
  for (int s = 0; s < N; ++s) {
    a[run(c, EngineKind::Clifford, n, s).value(c, "m")]++;
    b[run(c, EngineKind::StateVector, n, 1000000 + s).value(c, "m")]++;
  }
  int bins = 0;
  double chi2 = chi2_two_sample(a, b, bins);
  // 99.9% quantile of chi2 with (bins - 1) dof is below dof + 4.5 sqrt(dof) + 10 for these sizes
  double dof = bins - 1;
  EXPECT_LT(chi2, dof + 4.5 * std::sqrt(2 * dof) + 10) << "bins=" << bins;
}

TEST(Engine, DfsInvariantUnderCollectiveRotation) {
  for (double phi : {0.1, 1.0, M_PI}) {
    for (int logical = 0; logical < 3; ++logical) {
      StateVectorEngine a(2);
      // |01>, |10> and (|01>+|10>)/sqrt2 style encodings
      if (logical == 0) a.pauli(1, 'X');
      if (logical == 1) a.pauli(0, 'X');
      if (logical == 2) {
        a.h(0);
        a.cnot(0, 1);
        a.pauli(1, 'X');
        a.s(0);
      }
      StateVectorEngine b = a;
      b.rz(0, phi);
      b.rz(1, phi);
      EXPECT_NEAR(a.fidelity(b), 1.0, 1e-10);
    }
  }
}

TEST(Engine, DfsDifferentialRotation) {
  for (double phi : {0.1, 0.4, 1.0}) {
    StateVectorEngine a(2);
    a.h(0);
    a.cnot(0, 1);
    a.pauli(1, 'X');
    StateVectorEngine b = a;
    b.rz(0, phi);
    b.rz(1, -phi);
    // logical phase rotates by 2 phi, so |+_L> survival is cos^2(phi)
    EXPECT_NEAR(a.fidelity(b), std::pow(std::cos(phi), 2), 1e-12);
  }
}

TEST(Engine, CapabilityChecks) {
  TableauEngine t(2);
  EXPECT_NO_THROW(t.rz(0, M_PI / 2));
  EXPECT_NO_THROW(t.rz(0, M_PI));
  EXPECT_THROW(t.rz(0, 0.3), CapabilityError);
  EXPECT_THROW(StateVectorEngine(23), CapabilityError);
  EXPECT_NO_THROW(StateVectorEngine(3, 3));
  EXPECT_THROW(StateVectorEngine(4, 3), CapabilityError);
  Circuit c(1);
  c.rz(0, 0.2);
  EXPECT_THROW(run(c, EngineKind::Clifford, NoiseConfig{}, 1), CapabilityError);
  EXPECT_NO_THROW(run(c, EngineKind::StateVector, NoiseConfig{}, 1));
}

TEST(Engine, CliffordRzMatchesStateVector) {
  for (double th : {0.0, M_PI / 2, -M_PI / 2, M_PI}) {
    TableauEngine t(1);
    StateVectorEngine s(1);
    t.h(0);
    s.h(0);
    t.rz(0, th);
    s.rz(0, th);
    for (char l : {'X', 'Y'}) {
      PauliString p = PauliString::single(1, 0, l);
      EXPECT_NEAR(s.expectation(p), t.expectation(p), 1e-12) << th << l;
    }
  }
}

TEST(Engine, LeakedQubitReadsOneAndDetectionResets) {
  Circuit c(2);
  c.add_register("m", 1);
  c.add_register("leak", 1);
  c.add_register("after", 1);
  c.idle({0}, 1.0).measure('Z', 0, "m", 0).leak_detect(0, "leak", 0).measure('Z', 0, "after", 0);
  NoiseConfig n;
  n.p_leak = 1.0;
  for (auto kind : {EngineKind::Clifford, EngineKind::StateVector}) {
    ShotRecord r = run(c, kind, n, 2);
    EXPECT_EQ(r.value(c, "m"), 1u);
    EXPECT_EQ(r.value(c, "leak"), 1u);
    EXPECT_EQ(r.value(c, "after"), 0u);
  }
}

TEST(Engine, StateVectorGhz) {
  StateVectorEngine s(3);
  s.h(0);
  s.cnot(0, 1);
  s.cnot(1, 2);
  EXPECT_NEAR(s.expectation(PauliString::parse("X0X1X2", 3)), 1.0, 1e-12);
  EXPECT_NEAR(s.expectation(PauliString::parse("Z0Z2", 3)), 1.0, 1e-12);
  EXPECT_NEAR(s.probability_one(1), 0.5, 1e-12);
}
