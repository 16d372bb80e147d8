#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dfsqec/fit.hpp"
#include "json.hpp"

using namespace dfsqec;

namespace {

FitData exact(const DecayModel& m, const std::vector<double>& x) {
  std::vector<double> y, s;
  for (double v : x) {
    y.push_back(m.evaluate(v));
    s.push_back(1e-3);
  }
  return FitData::from_sigma(x, y, s);
}

FitData sampled(const DecayModel& m, const std::vector<double>& x, std::uint64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> k, ns;
  for (double v : x) {
    k.push_back(std::binomial_distribution<std::uint64_t>(n, m.evaluate(v))(rng));
    ns.push_back(n);
  }
  return FitData::binomial(x, k, ns);
}

}  // namespace

TEST(Model, ClosedForms) {
  EXPECT_NEAR(DecayModel::phys_dfs(0.002, 0, 0.5 * std::sqrt(2.0)).evaluate(2.0), 0.6832, 1e-4);
  EXPECT_NEAR(DecayModel::retention(0.019).evaluate(23.0), 0.646, 1e-3);
  EXPECT_NEAR(DecayModel::qec_cycles(0.003, 0.0).evaluate(7.0), 1 - 0.003, 1e-15);
  EXPECT_NEAR(DecayModel::phys_dfs(0.01, 0.2, 0.3).evaluate(0.0), 0.99, 1e-15);
}

TEST(Model, QecExponentialApproximation) {
  DecayModel m = DecayModel::qec_cycles(0.0, 0.02);
  for (int n = 0; n <= 10; ++n) {
    double approx = 0.5 + 0.5 * std::exp(-2 * 0.02 * n);
    EXPECT_NEAR(m.evaluate(n) / approx, 1.0, 0.01) << n;
  }
}

TEST(Model, JacobianMatchesFiniteDifferences) {
  std::vector<DecayModel> ms = {DecayModel::phys_dfs(0.01, 0.05, 0.4), DecayModel::qec_cycles(0.004, 0.02),
                                DecayModel::retention(0.019)};
  for (const auto& m : ms) {
    for (double x : {0.3, 2.0, 7.5}) {
      auto J = m.jacobian(x);
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        const double h = 1e-6;
        DecayModel a = m, b = m;
        a.params[i] += h;
        b.params[i] -= h;
        EXPECT_NEAR(J[i], (a.evaluate(x) - b.evaluate(x)) / (2 * h), 1e-6);
      }
    }
  }
}

TEST(Model, InvalidParametersRejected) {
  EXPECT_THROW(DecayModel::phys_dfs(0.7, 0, 0).validate(), std::invalid_argument);
  EXPECT_THROW(DecayModel::retention(-1).validate(), std::invalid_argument);
  EXPECT_THROW(parse_model_kind("quadratic"), std::invalid_argument);
  EXPECT_EQ(parse_model_kind("qec_cycles"), ModelKind::QecCycles);
}

TEST(Fit, NoiselessRoundTrip) {
  std::vector<double> t = {0, 0.5, 1, 1.5, 2, 3, 4, 5};
  DecayModel m = DecayModel::phys_dfs(0.003, 0.08, 0.5);
  FitResult r = fit(exact(m, t), ModelKind::PhysDfs);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.model.params[i], m.params[i], 1e-6);
  std::vector<double> n = {0, 1, 2, 3, 4, 5, 6, 8};
  DecayModel q = DecayModel::qec_cycles(0.002, 0.018);
  FitResult rq = fit(exact(q, n), ModelKind::QecCycles);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(rq.model.params[i], q.params[i], 1e-6);
  EXPECT_NEAR(rq.chi2, 0.0, 1e-8);
}

TEST(Fit, PinningProtocol) {
  FitOptions zx = default_fit_options(ModelKind::PhysDfs, 'X');
  ASSERT_EQ(zx.pinned.size(), 3u);
  EXPECT_EQ(zx.pinned[1], 0.0);
  EXPECT_FALSE(zx.pinned[2].has_value());
  FitOptions zz = default_fit_options(ModelKind::PhysDfs, 'Z');
  EXPECT_EQ(zz.pinned[2], 0.0);
  std::vector<double> t = {0, 1, 2, 3, 4, 5};
  FitResult r = fit(exact(DecayModel::phys_dfs(0.002, 0, 0.6), t), ModelKind::PhysDfs, zx);
  EXPECT_FALSE(r.free[1]);
  EXPECT_EQ(r.stderr_[1], 0.0);
  EXPECT_EQ(r.model.params[1], 0.0);
  EXPECT_NEAR(r.model.params[2], 0.6, 1e-6);
}

TEST(Fit, SyntheticRecovery) {
  std::vector<double> t;
  for (int i = 0; i <= 12; ++i) t.push_back(0.5 * i);
  FitResult r = fit(sampled(DecayModel::phys_dfs(0.002, 0, 0.7071), t, 10000, 3), ModelKind::PhysDfs,
                    default_fit_options(ModelKind::PhysDfs, 'X'));
  EXPECT_NEAR(r.model.params[2], 0.7071, 0.05 * 0.7071);
  EXPECT_GT(r.stderr_[2], 0.0);
  std::vector<double> n = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  FitResult q = fit(sampled(DecayModel::qec_cycles(0.003, 0.02), n, 10000, 4), ModelKind::QecCycles);
  EXPECT_NEAR(q.model.params[1], 0.02, 0.002);
  EXPECT_GE(q.dof, 1);
}

TEST(Fit, BoundaryFlagged) {
  std::vector<double> x = {0, 1, 2, 3};
  std::vector<std::uint64_t> k = {100, 100, 100, 100}, n = {100, 100, 100, 100};
  FitResult r = fit(FitData::binomial(x, k, n), ModelKind::QecCycles);
  EXPECT_TRUE(r.boundary);
  EXPECT_NEAR(r.model.params[1], 0.0, 1e-6);
}

TEST(Fit, TooFewPointsThrows) {
  std::vector<double> x = {0, 1};
  std::vector<std::uint64_t> k = {90, 80}, n = {100, 100};
  EXPECT_THROW(fit(FitData::binomial(x, k, n), ModelKind::QecCycles), FitError);
}

TEST(Lifetime, ThresholdCrossings) {
  DecayModel r = DecayModel::retention(0.019);
  EXPECT_NEAR(lifetime(r, std::exp(-1.0)).seconds, 1 / 0.019, 1e-6);
  DecayModel q = DecayModel::qec_cycles(0.0, 0.02);
  LifetimeSolve s = lifetime(q, kProcessThreshold, 1.0);
  EXPECT_NEAR(q.evaluate(s.seconds), kProcessThreshold, 1e-9);
  EXPECT_NEAR(lifetime(q, kProcessThreshold, 0.5).seconds, 0.5 * s.seconds, 1e-6);
  DecayModel p = DecayModel::phys_dfs(0.0, 0.0, 0.7071);
  EXPECT_NEAR(lifetime(p, kProcessThreshold).seconds, 2 * lifetime(DecayModel::phys_dfs(0, 0, 2 * 0.7071), kProcessThreshold).seconds, 1e-6);
  EXPECT_TRUE(lifetime(DecayModel::qec_cycles(0, 0), kProcessThreshold).unbounded);
  EXPECT_TRUE(lifetime(DecayModel::qec_cycles(0.3, 0.01), kProcessThreshold).below_at_start);
  LifetimeSolve integ = integrity_lifetime(p);
  EXPECT_NEAR(2 * (p.evaluate(integ.seconds) - 0.5), kIntegrityThreshold, 1e-9);
}

TEST(Output, TableAndLifetimes) {
  std::vector<double> t = {0, 1, 2, 3, 4};
  LabeledFit a{"phys", fit(exact(DecayModel::phys_dfs(0.002, 0, 0.7), t), ModelKind::PhysDfs), 1.0};
  LabeledFit b{"qec", fit(exact(DecayModel::qec_cycles(0.002, 0.02), t), ModelKind::QecCycles), 0.5};
  std::string csv = table1_csv({a, b});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,model,parameter,value,stderr,pinned,boundary");
  EXPECT_NE(csv.find("phys,phys_dfs,Gamma_over_sqrt2,"), std::string::npos);
  EXPECT_NE(csv.find("qec,qec_cycles,rate_2eps_m_over_tau,0.08"), std::string::npos);
  LifetimeEntry e1{"phys", lifetime(a.result.model, kProcessThreshold), std::nullopt, 1.0, std::nullopt};
  LifetimeEntry e2{"qec", lifetime(b.result.model, kProcessThreshold, 0.5), std::nullopt, 1.0, std::nullopt};
  auto j = nlohmann::json::parse(lifetime_json({e1, e2}));
  EXPECT_EQ(j["reference"], "phys");
  EXPECT_NEAR(j["entries"][1]["process_improvement"].get<double>(), e2.process.seconds / e1.process.seconds, 1e-9);
}

TEST(Output, FitSummary) {
  nlohmann::json j;
  j["kind"] = "dfs_qec";
  j["mode"] = "post-select";
  j["tau_cycle"] = 0.5;
  auto& fi = j["fit_input"];
  fi["model"] = "qec_cycles";
  fi["x_unit"] = "cycles";
  DecayModel m = DecayModel::qec_cycles(0.002, 0.02);
  std::vector<double> x = {0, 1, 2, 3, 4, 5}, fp, pw, sig;
  std::vector<long long> k, rk, n;
  for (double v : x) {
    double p = m.evaluate(v);
    k.push_back(std::llround(p * 1e4));
    rk.push_back(std::llround(std::exp(-0.05 * v) * 1e4));
    n.push_back(10000);
    fp.push_back((3 * p - 1) / 2);
    pw.push_back(p);
    sig.push_back(1e-3);
  }
  fi["states"] = nlohmann::json::array();
  for (const char* s : {"0", "1", "+", "-", "+i", "-i"})
    fi["states"].push_back({{"label", s}, {"x", x}, {"k", k}, {"n", n}});
  fi["F_p"] = {{"x", x}, {"y", fp}, {"sigma", sig}};
  fi["p_worst"] = {{"x", x}, {"y", pw}, {"sigma", sig}};
  fi["retention"] = {{"x", x}, {"k", rk}, {"n", n}};
  SummaryFit sf = fit_summary(j.dump());
  EXPECT_EQ(sf.label, "dfs_qec_ps");
  EXPECT_EQ(sf.fits.size(), 9u);
  EXPECT_EQ(sf.lifetimes.label, "dfs_qec_ps");
  EXPECT_FALSE(sf.lifetimes.process.unbounded);
  EXPECT_TRUE(sf.lifetimes.integrity.has_value());
  EXPECT_EQ(fit_summary(j.dump(), "x").label, "x");
  EXPECT_THROW(fit_summary("{not json"), FitError);
  EXPECT_THROW(fit_summary("{}"), FitError);
}
