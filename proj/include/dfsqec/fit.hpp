#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfsqec {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { PhysDfs, QecCycles, Retention };
ModelKind parse_model_kind(const std::string& s);
const char* model_kind_name(ModelKind k);

// phys_dfs: (eps_s, gamma, Gamma)   F(t) = 1/2 + (1/2 - eps_s) exp(-gamma t - (Gamma t)^2 / 2)
// qec_cycles: (eps_s, eps_m)        F(n) = 1/2 + (1/2 - eps_s) (1 - 2 eps_m)^n
// retention: (eta)                  p(t) = exp(-eta t)
struct DecayModel {
  ModelKind kind = ModelKind::PhysDfs;
  std::vector<double> params;

  static DecayModel phys_dfs(double eps_s, double gamma, double Gamma);
  static DecayModel qec_cycles(double eps_s, double eps_m);
  static DecayModel retention(double eta);

  static std::size_t num_params(ModelKind k);
  static std::vector<std::string> param_names(ModelKind k);
  static double lower_bound(ModelKind k, std::size_t i);
  static double upper_bound(ModelKind k, std::size_t i);

  double evaluate(double x) const;
  std::vector<double> jacobian(double x) const;  // d evaluate / d params
  void validate() const;
};

struct FitData {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;  // 1 / variance

  // Survival counts with binomial weights from the Laplace-smoothed proportion.
  static FitData binomial(const std::vector<double>& x, const std::vector<std::uint64_t>& k,
                          const std::vector<std::uint64_t>& n);
  static FitData from_sigma(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& sigma);
  std::size_t size() const { return x.size(); }
};

struct FitOptions {
  std::vector<std::optional<double>> pinned;  // per parameter; empty = all free
  int max_simplex_iterations = 4000;
  int max_refine_iterations = 500;
  double tolerance = 1e-12;
};

// The pinning protocol: superposition states decay Gaussian (gamma = 0), computational states
// exponential (Gamma = 0).
FitOptions default_fit_options(ModelKind kind, char basis);

struct FitResult {
  DecayModel model;
  std::vector<double> stderr_;  // asymptotic standard errors, 0 for pinned parameters
  std::vector<std::vector<double>> covariance;
  std::vector<bool> free;
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  bool boundary = false;  // a free parameter sits on its bound
  std::string diagnostics;
};

FitResult fit(const FitData& data, ModelKind kind, const FitOptions& opt = {});

inline constexpr double kProcessThreshold = 0.8160602794142788;    // 1 - 1/(2e)
inline constexpr double kIntegrityThreshold = 0.36787944117144233;  // 1/e

struct LifetimeSolve {
  double seconds = 0.0;
  bool unbounded = false;       // threshold not reached within the horizon
  bool below_at_start = false;  // curve starts below the threshold
};

// Time at which the model curve crosses `threshold`; cycle models use n = t / tau.
LifetimeSolve lifetime(const DecayModel& model, double threshold, double tau = 1.0, double horizon = 1e5);
// Integrity lifetime from a model of the worst-basis survival: R = 2 (p - 1/2) reaches 1/e.
LifetimeSolve integrity_lifetime(const DecayModel& p_worst_model, double tau = 1.0, double horizon = 1e5);

struct LifetimeEntry {
  std::string label;
  LifetimeSolve process;
  std::optional<LifetimeSolve> integrity;
  double process_improvement = 1.0;  // relative to the reference entry
  std::optional<double> integrity_improvement;
};

struct LabeledFit {
  std::string label;
  FitResult result;
  double tau = 1.0;  // seconds per x unit
};

std::string table1_csv(const std::vector<LabeledFit>& fits);
// The first entry is the reference for improvement factors.
std::string lifetime_json(std::vector<LifetimeEntry> entries);
void fill_improvements(std::vector<LifetimeEntry>& entries);

// Fits of one experiment summary (the JSON written by results_json).
struct SummaryFit {
  std::string label;
  std::vector<LabeledFit> fits;  // per state, then F_p, p_worst, retention when present
  LifetimeEntry lifetimes;
};

// Label defaults to the run kind, with "_ps" appended for post-selected runs.
SummaryFit fit_summary(const std::string& summary_json, const std::string& label = "");

}  // namespace dfsqec
