#include <gtest/gtest.h>

#include <cmath>

#include "dfsqec/executor.hpp"
#include "dfsqec/experiments.hpp"
#include "dfsqec/noise.hpp"
#include "dfsqec/rng.hpp"

using namespace dfsqec;

namespace {

double survival(const NoiseConfig& n, LogicalState s, double t, std::uint64_t shots, EngineKind engine,
                QubitKind kind = QubitKind::Physical) {
  ExperimentPlan p;
  p.kind = kind;
  p.states = {s};
  p.times = {t};
  p.shots = shots;
  p.noise = n;
  p.engine = engine;
  p.seed = 11;
  MemoryResult r = run_memory(p);
  return r.points.at(0).p(DecodeMode::Correct);
}

double sigma(double p, double n) { return std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(Noise, ZeroGammaGivesZeroOffsets) {
  NoiseConfig n;
  auto z = ZoneAssignment::standard(10, 10, n, true);
  Rng rng(1);
  auto s = sample_quasi_static(n, z, rng);
  for (double v : s.qubit_offsets) EXPECT_EQ(v, 0.0);
}

TEST(Noise, QuasiStaticVariance) {
  NoiseConfig n;
  n.Gamma_quasi = 0.7071;
  n.pair_colocated = false;
  auto z = ZoneAssignment::standard(1, 0, n, false);
  Rng rng(3);
  double sum2 = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    double v = sample_quasi_static(n, z, rng).qubit_offsets[0];
    sum2 += v * v;
  }
  EXPECT_NEAR(sum2 / N, n.Gamma_quasi * n.Gamma_quasi, 0.02 * n.Gamma_quasi * n.Gamma_quasi);
}

TEST(Noise, GaussianIdentity) {
  const double G = 0.7071;
  Rng rng(9);
  std::normal_distribution<double> normal(0.0, G);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = normal(rng);
  for (double gt : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    double t = gt / G, acc = 0;
    for (double d : draws) acc += std::cos(d * t);
    EXPECT_NEAR(acc / draws.size(), std::exp(-0.5 * gt * gt), 0.01) << gt;
  }
}

TEST(Noise, ColocatedPairsShareCommonOffset) {
  NoiseConfig n;
  n.Gamma_quasi = 1.0;
  n.differential_fraction = 0.0;
  auto z = ZoneAssignment::standard(10, 10, n, true);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    auto s = sample_quasi_static(n, z, rng);
    for (int q = 0; q < 10; q += 2) EXPECT_EQ(s.qubit_offsets[q], s.qubit_offsets[q + 1]);
  }
  n.differential_fraction = 0.1;
  auto s = sample_quasi_static(n, z, rng);
  EXPECT_NE(s.qubit_offsets[0], s.qubit_offsets[1]);
}

TEST(Noise, IdleZProbabilityConvention) {
  NoiseConfig n;
  n.gamma_fast = 0.1;
  ShotNoise sn(n, ZoneAssignment::standard(1, 0, n, false), QuasiStaticSample{{0.0}, {0.0}, {0.0}});
  EXPECT_NEAR(1 - 2 * sn.idle_z_probability(2.0), std::exp(-0.2), 1e-15);
  EXPECT_EQ(sn.idle_z_probability(0.0), 0.0);
}

TEST(Noise, FastDephasingSurvival) {
  NoiseConfig n;
  n.gamma_fast = 0.1;
  const double expect = 0.5 * (1 + std::exp(-0.2));
  EXPECT_NEAR(expect, 0.9094, 5e-5);
  for (auto e : {EngineKind::Clifford, EngineKind::StateVector}) {
    double p = survival(n, LogicalState::Plus, 2.0, 10000, e);
    EXPECT_NEAR(p, expect, 4 * sigma(expect, 10000));
  }
}

TEST(Noise, QuasiStaticSurvivalStateVector) {
  NoiseConfig n;
  n.Gamma_quasi = 0.7071;
  const double expect = 0.5 * (1 + std::exp(-0.5 * std::pow(0.7071 * 2.0, 2)));
  double p = survival(n, LogicalState::Plus, 2.0, 10000, EngineKind::StateVector);
  EXPECT_NEAR(p, expect, 4 * sigma(expect, 10000));
}

TEST(Noise, TwirlMatchesCoherentForExponential) {
  NoiseConfig n;
  n.gamma_fast = 0.3;
  double a = survival(n, LogicalState::Plus, 1.5, 10000, EngineKind::Clifford);
  double b = survival(n, LogicalState::Plus, 1.5, 10000, EngineKind::StateVector);
  EXPECT_NEAR(a, b, 4 * std::sqrt(2.0) * sigma(0.5 * (a + b), 10000));
}

TEST(Noise, TwirlMatchesCoherentForQuasiStatic) {
  NoiseConfig n;
  n.Gamma_quasi = 0.7071;
  double a = survival(n, LogicalState::Plus, 1.5, 10000, EngineKind::Clifford);
  double b = survival(n, LogicalState::Plus, 1.5, 10000, EngineKind::StateVector);
  EXPECT_NEAR(a, b, 4 * std::sqrt(2.0) * sigma(0.5 * (a + b), 10000));
}

TEST(Noise, MeasurementFlipRate) {
  Circuit c(1);
  c.add_register("m", 1);
  c.measure('Z', 0, "m", 0);
  NoiseConfig n;
  n.p_meas = 0.003;
  const int N = 100000;
  int flips = 0;
  for (int s = 0; s < N; ++s) flips += static_cast<int>(run(c, EngineKind::Clifford, n, s).value(c, "m"));
  EXPECT_NEAR(flips / double(N), 0.003, 3 * sigma(0.003, N));
}

TEST(Noise, DfsRejectsCollectiveNoise) {
  NoiseConfig n;
  n.Gamma_quasi = 3.0;
  n.pair_colocated = true;
  n.differential_fraction = 0.0;
  for (auto e : {EngineKind::Clifford, EngineKind::StateVector})
    EXPECT_EQ(survival(n, LogicalState::Plus, 5.0, 500, e, QubitKind::Dfs), 1.0);
}

TEST(Noise, ComputationalStatesFlatUnderDephasing) {
  NoiseConfig n = noise_preset("dephasing-only");
  n.p_meas = 0.002;
  n.p_spam_extra = 0.001;
  for (double t : {0.0, 3.0, 6.0}) {
    double p = survival(n, LogicalState::Zero, t, 4000, EngineKind::Clifford);
    EXPECT_GE(p, 1 - n.p_meas - n.p_spam_extra - 4 * sigma(0.003, 4000));
  }
}

TEST(Noise, PresetsAndOverrides) {
  for (const auto& name : noise_preset_names()) EXPECT_NO_THROW(noise_preset(name).validate());
  EXPECT_TRUE(noise_preset("ideal").is_noiseless());
  NoiseConfig h = noise_preset("h1-like");
  EXPECT_NEAR(h.Gamma_quasi / std::sqrt(2.0), 0.5, 1e-4);
  EXPECT_THROW(noise_preset("nope"), std::invalid_argument);
  NoiseConfig n;
  n.set("p2", "0.01");
  EXPECT_EQ(n.p2, 0.01);
  n.set("delta_B", "1e-4");
  EXPECT_NEAR(n.effective_Gamma(), 2 * M_PI * 2032 * 1e-4, 1e-12);
  EXPECT_THROW(n.set("p3", "0"), std::invalid_argument);
  EXPECT_THROW(n.set("p2", "abc"), std::invalid_argument);
  NoiseConfig bad;
  bad.p1 = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = NoiseConfig{};
  bad.zone_count = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  auto m = h.to_map();
  NoiseConfig back;
  for (const auto& [k, v] : m) back.set(k, v);
  EXPECT_EQ(back.to_map(), m);
}
