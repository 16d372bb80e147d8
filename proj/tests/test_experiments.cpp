#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dfsqec/experiments.hpp"
#include "dfsqec/fit.hpp"
#include "json.hpp"

using namespace dfsqec;

namespace {

using S = LogicalState;

ExperimentPlan plan_for(QubitKind kind, std::uint64_t shots) {
  ExperimentPlan p;
  p.kind = kind;
  p.states = {all_states().begin(), all_states().end()};
  if (kind == QubitKind::DfsQec) p.cycles = {0, 1, 2};
  else p.times = {0.0, 1.0, 2.5};
  p.shots = shots;
  p.seed = 21;
  return p;
}

std::map<S, double> probs(double z0, double z1, double x0, double x1, double y0, double y1) {
  return {{S::Zero, z0}, {S::One, z1}, {S::Plus, x0}, {S::Minus, x1}, {S::PlusI, y0}, {S::MinusI, y1}};
}

}  // namespace

TEST(Metrics, DerivedExamples) {
  MetricRow a = metrics_from_probabilities(probs(1, 1, 1, 1, 1, 1), false);
  EXPECT_EQ(a.F_a, 1.0);
  EXPECT_EQ(a.F_p, 1.0);
  EXPECT_EQ(a.R, 1.0);
  MetricRow b = metrics_from_probabilities(probs(.5, .5, .5, .5, .5, .5), false);
  EXPECT_EQ(b.F_a, 0.5);
  EXPECT_EQ(b.F_p, 0.25);
  EXPECT_EQ(b.R, 0.0);
  MetricRow c = metrics_from_probabilities(probs(1, 1, .75, .75, .75, .75), false);
  EXPECT_NEAR(c.F_a, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(c.F_p, 0.75, 1e-15);
  EXPECT_NEAR(c.p_worst, 0.75, 1e-15);
  EXPECT_NEAR(c.R, 0.5, 1e-15);
}

TEST(Metrics, RandomizedAlgebra) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    auto p = probs(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
    MetricRow m = metrics_from_probabilities(p, false);
    double fa = 0;
    for (auto [s, v] : p) fa += v / 6;
    double pw = std::min({(p[S::Zero] + p[S::One]) / 2, (p[S::Plus] + p[S::Minus]) / 2, (p[S::PlusI] + p[S::MinusI]) / 2});
    EXPECT_NEAR(m.F_a, fa, 1e-12);
    EXPECT_NEAR(m.F_p, (3 * m.F_a - 1) / 2, 1e-12);
    EXPECT_NEAR(m.p_worst, pw, 1e-12);
    EXPECT_NEAR(m.R, 2 * std::abs(m.p_worst - 0.5), 1e-12);
    auto swapped = p;
    std::swap(swapped[S::Plus], swapped[S::Minus]);
    EXPECT_NEAR(metrics_from_probabilities(swapped, false).R, m.R, 1e-15);
  }
}

TEST(Metrics, ThreeStateAssumption) {
  std::map<S, double> p = {{S::One, 0.9}, {S::Plus, 0.8}, {S::PlusI, 0.7}};
  EXPECT_THROW(metrics_from_probabilities(p, false), MetricError);
  MetricRow m = metrics_from_probabilities(p, true);
  EXPECT_EQ(m.assumed.size(), 3u);
  EXPECT_NEAR(m.F_a, (0.9 + 0.8 + 0.7) / 3, 1e-15);
  EXPECT_NEAR(m.p_worst, 0.7, 1e-15);
}

TEST(Metrics, WilsonInterval) {
  Interval i = wilson_interval(50, 100);
  EXPECT_NEAR(i.lo, 0.4038, 1e-4);
  EXPECT_NEAR(i.hi, 0.5962, 1e-4);
  Interval all = wilson_interval(100, 100);
  EXPECT_EQ(all.hi, 1.0);
  EXPECT_LT(all.lo, 1.0);
}

TEST(Memory, ZeroNoiseSurvivesEverywhere) {
  for (auto kind : {QubitKind::Physical, QubitKind::Dfs, QubitKind::DfsQec}) {
    for (auto mode : {DecodeMode::Correct, DecodeMode::PostSelect}) {
      ExperimentPlan p = plan_for(kind, 20);
      p.mode = mode;
      MemoryResult r = run_memory(p);
      for (const auto& pt : r.points) EXPECT_EQ(pt.p(mode), 1.0) << qubit_kind_name(kind);
      for (const auto& m : compute_metrics(r)) EXPECT_EQ(m.F_p, 1.0);
      if (kind == QubitKind::DfsQec && mode == DecodeMode::PostSelect) {
        for (const auto& row : retention(r)) EXPECT_EQ(row.fraction, 1.0);
      }
    }
  }
}

TEST(Memory, StateVectorCompactCycleAgreesWhenNoiseless) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 2);
  p.states = {S::Zero, S::MinusI};
  p.cycles = {1};
  p.engine = EngineKind::StateVector;
  p.layout = AncillaLayout::Compact;
  MemoryResult r = run_memory(p);
  for (const auto& pt : r.points) EXPECT_EQ(pt.p(DecodeMode::Correct), 1.0);
}

TEST(Memory, CapabilityErrorsSurfaceBeforeExecution) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 10);
  p.engine = EngineKind::StateVector;
  EXPECT_THROW(run_memory(p), CapabilityError);
  ExperimentPlan q = plan_for(QubitKind::Physical, 10);
  q.noise.Gamma_quasi = 1.0;
  q.noise.twirl_quasi_static = false;
  EXPECT_THROW(run_memory(q), CapabilityError);
  ExperimentPlan e = plan_for(QubitKind::Physical, 10);
  e.states.clear();
  EXPECT_THROW(run_memory(e), std::invalid_argument);
}

TEST(Memory, DeterministicAcrossWorkerCounts) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 150);
  p.noise = noise_preset("h1-like");
  p.mode = DecodeMode::PostSelect;
  p.workers = 1;
  std::string a = results_csv(run_memory(p));
  p.workers = 3;
  std::string b = results_csv(run_memory(p));
  EXPECT_EQ(a, b);
  p.seed = 22;
  EXPECT_NE(results_csv(run_memory(p)), a);
}

TEST(Memory, CountsAreConsistent) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 200);
  p.noise = noise_preset("h1-like");
  p.noise.p2 = 0.02;
  p.mode = DecodeMode::PostSelect;
  MemoryResult r = run_memory(p);
  for (const auto& pt : r.points) {
    EXPECT_EQ(pt.survivors(p.mode) + pt.failures(p.mode) + pt.rejected(p.mode), pt.counts.total);
    EXPECT_LE(pt.counts.accepted, pt.counts.total);
    EXPECT_EQ(pt.survivors(DecodeMode::Correct) + pt.failures(DecodeMode::Correct), pt.counts.total);
    EXPECT_NEAR(pt.time, pt.cycles * p.noise.tau_cycle, 1e-12);
  }
  EXPECT_THROW(retention(run_memory(plan_for(QubitKind::DfsQec, 5))), MetricError);
  EXPECT_THROW(retention(run_memory(plan_for(QubitKind::Physical, 5))), MetricError);
}

TEST(Memory, PhysicalQuasiStaticClosedForm) {
  ExperimentPlan p = plan_for(QubitKind::Physical, 10000);
  p.states = {S::Plus};
  p.times = {2.0};
  p.noise.Gamma_quasi = std::sqrt(2.0) * 0.5;
  p.engine = EngineKind::StateVector;
  MemoryResult r = run_memory(p);
  const double expect = 0.5 * (1 + std::exp(-0.5 * std::pow(p.noise.Gamma_quasi * 2.0, 2)));
  EXPECT_NEAR(r.points[0].p(DecodeMode::Correct), expect, 0.013);
}

TEST(Memory, DepolarizingQecMatchesCycleModel) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 3000);
  p.states = {S::Zero};
  p.cycles = {0, 1, 2, 3, 4, 5, 6};
  p.noise = noise_preset("h1-like");
  p.noise.Gamma_quasi = 0;
  p.noise.differential_fraction = 0;
  MemoryResult r = run_memory(p);
  std::vector<double> x;
  std::vector<std::uint64_t> k, n;
  for (const auto& pt : r.points) {
    x.push_back(pt.cycles);
    k.push_back(pt.survivors(DecodeMode::Correct));
    n.push_back(pt.denominator(DecodeMode::Correct));
  }
  FitResult f = fit(FitData::binomial(x, k, n), ModelKind::QecCycles);
  EXPECT_GT(f.model.params[1], 0.005);
  EXPECT_LT(f.model.params[1], 0.05);
  for (const auto& pt : r.points) {
    Interval ci = wilson_interval(pt.survivors(DecodeMode::Correct), pt.denominator(DecodeMode::Correct), 3.29);
    double m = f.model.evaluate(pt.cycles);
    EXPECT_GE(m, ci.lo) << pt.cycles;
    EXPECT_LE(m, ci.hi) << pt.cycles;
  }
}

TEST(Memory, PostSelectionNeverHurts) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 100000);
  p.states = {S::Plus};
  p.cycles = {2};
  p.noise = noise_preset("h1-like");
  p.mode = DecodeMode::PostSelect;
  MemoryResult r = run_memory(p);
  const MemoryPoint& pt = r.points[0];
  double err_ps = 1 - pt.p(DecodeMode::PostSelect), err_c = 1 - pt.p(DecodeMode::Correct);
  EXPECT_LE(err_ps, err_c);
  EXPECT_LT(pt.counts.accepted, pt.counts.total);
}

TEST(Output, CsvAndJson) {
  ExperimentPlan p = plan_for(QubitKind::DfsQec, 30);
  p.mode = DecodeMode::PostSelect;
  p.noise = noise_preset("h1-like");
  MemoryResult r = run_memory(p);
  std::string csv = results_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "state,time_s,cycles,survivors,accepted,total,p,ci_lo,ci_hi");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 18);
  auto j = nlohmann::json::parse(results_json(r, false));
  EXPECT_EQ(j["kind"], "dfs_qec");
  EXPECT_EQ(j["fit_input"]["model"], "qec_cycles");
  EXPECT_EQ(j["fit_input"]["states"].size(), 6u);
  EXPECT_TRUE(j.contains("retention"));
  EXPECT_EQ(j["metrics"].size(), 3u);
  for (const auto& m : j["metrics"])
    EXPECT_NEAR(m["F_p"].get<double>(), (3 * m["F_a"].get<double>() - 1) / 2, 1e-12);
}

TEST(Output, MissingStatesReportedInJson) {
  ExperimentPlan p = plan_for(QubitKind::Dfs, 10);
  p.states = {S::One, S::Plus, S::PlusI};
  MemoryResult r = run_memory(p);
  EXPECT_THROW(compute_metrics(r), MetricError);
  auto j = nlohmann::json::parse(results_json(r, false));
  EXPECT_TRUE(j.contains("metrics_error"));
  auto k = nlohmann::json::parse(results_json(r, true));
  EXPECT_TRUE(k.contains("metrics"));
  EXPECT_EQ(k["metrics"][0]["assumed"].size(), 3u);
}
