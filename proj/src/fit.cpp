#include "dfsqec/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace dfsqec {

ModelKind parse_model_kind(const std::string& s) {
  if (s == "phys_dfs") return ModelKind::PhysDfs;
  if (s == "qec_cycles") return ModelKind::QecCycles;
  if (s == "retention") return ModelKind::Retention;
  throw std::invalid_argument("unknown model '" + s + "' (expected phys_dfs, qec_cycles or retention)");
}

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::PhysDfs: return "phys_dfs";
    case ModelKind::QecCycles: return "qec_cycles";
    case ModelKind::Retention: return "retention";
  }
  return "?";
}

// ------------------------------------------------------------------ model

DecayModel DecayModel::phys_dfs(double eps_s, double gamma, double Gamma) {
  return {ModelKind::PhysDfs, {eps_s, gamma, Gamma}};
}
DecayModel DecayModel::qec_cycles(double eps_s, double eps_m) { return {ModelKind::QecCycles, {eps_s, eps_m}}; }
DecayModel DecayModel::retention(double eta) { return {ModelKind::Retention, {eta}}; }

std::size_t DecayModel::num_params(ModelKind k) {
  return k == ModelKind::PhysDfs ? 3 : k == ModelKind::QecCycles ? 2 : 1;
}

std::vector<std::string> DecayModel::param_names(ModelKind k) {
  switch (k) {
    case ModelKind::PhysDfs: return {"eps_s", "gamma", "Gamma"};
    case ModelKind::QecCycles: return {"eps_s", "eps_m"};
    case ModelKind::Retention: return {"eta"};
  }
  return {};
}

double DecayModel::lower_bound(ModelKind, std::size_t) { return 0.0; }

double DecayModel::upper_bound(ModelKind k, std::size_t i) {
  if (k == ModelKind::Retention) return 1e6;
  if (i == 0) return 0.5;
  return k == ModelKind::QecCycles ? 0.5 : 1e6;
}

void DecayModel::validate() const {
  if (params.size() != num_params(kind)) throw std::invalid_argument("wrong number of model parameters");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!(params[i] >= lower_bound(kind, i) && params[i] <= upper_bound(kind, i)))
      throw std::invalid_argument("model parameter " + param_names(kind)[i] + " out of range");
}

double DecayModel::evaluate(double x) const {
  const auto& p = params;
  switch (kind) {
    case ModelKind::PhysDfs: return 0.5 + (0.5 - p[0]) * std::exp(-p[1] * x - 0.5 * (p[2] * x) * (p[2] * x));
    case ModelKind::QecCycles: return 0.5 + (0.5 - p[0]) * std::pow(1.0 - 2.0 * p[1], x);
    case ModelKind::Retention: return std::exp(-p[0] * x);
  }
  return 0.0;
}

std::vector<double> DecayModel::jacobian(double x) const {
  const auto& p = params;
  switch (kind) {
    case ModelKind::PhysDfs: {
      const double e = std::exp(-p[1] * x - 0.5 * (p[2] * x) * (p[2] * x)), a = 0.5 - p[0];
      return {-e, -a * x * e, -a * p[2] * x * x * e};
    }
    case ModelKind::QecCycles: {
      const double q = 1.0 - 2.0 * p[1], a = 0.5 - p[0];
      const double dq = x == 0.0 ? 0.0 : -2.0 * a * x * std::pow(q, x - 1.0);
      return {-std::pow(q, x), dq};
    }
    case ModelKind::Retention: return {-x * std::exp(-p[0] * x)};
  }
  return {};
}

// ------------------------------------------------------------------- data

FitData FitData::binomial(const std::vector<double>& x, const std::vector<std::uint64_t>& k,
                          const std::vector<std::uint64_t>& n) {
  if (x.size() != k.size() || x.size() != n.size()) throw std::invalid_argument("series lengths differ");
  FitData d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (n[i] == 0) continue;
    if (k[i] > n[i]) throw std::invalid_argument("survivors exceed total");
    const double nn = static_cast<double>(n[i]);
    const double pl = (static_cast<double>(k[i]) + 1.0) / (nn + 2.0);
    d.x.push_back(x[i]);
    d.y.push_back(static_cast<double>(k[i]) / nn);
    d.w.push_back(nn / (pl * (1.0 - pl)));
  }
  return d;
}

FitData FitData::from_sigma(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& sigma) {
  if (x.size() != y.size() || x.size() != sigma.size()) throw std::invalid_argument("series lengths differ");
  FitData d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0) || !std::isfinite(y[i])) continue;
    d.x.push_back(x[i]);
    d.y.push_back(y[i]);
    d.w.push_back(1.0 / (sigma[i] * sigma[i]));
  }
  return d;
}

FitOptions default_fit_options(ModelKind kind, char basis) {
  FitOptions o;
  if (kind == ModelKind::PhysDfs) {
    o.pinned.assign(3, std::nullopt);
    if (basis == 'Z') o.pinned[2] = 0.0;
    else o.pinned[1] = 0.0;
  }
  return o;
}

// -------------------------------------------------------------------- fit

namespace {

struct Problem {
  const FitData& data;
  ModelKind kind;
  std::vector<double> base;  // full parameter vector with pinned values
  std::vector<std::size_t> free_idx;

  DecayModel model(const std::vector<double>& theta) const {
    DecayModel m{kind, base};
    for (std::size_t j = 0; j < free_idx.size(); ++j) {
      std::size_t i = free_idx[j];
      m.params[i] = std::clamp(theta[j], DecayModel::lower_bound(kind, i), DecayModel::upper_bound(kind, i));
    }
    return m;
  }

  std::vector<double> clamp(std::vector<double> theta) const {
    for (std::size_t j = 0; j < free_idx.size(); ++j) {
      std::size_t i = free_idx[j];
      theta[j] = std::clamp(theta[j], DecayModel::lower_bound(kind, i), DecayModel::upper_bound(kind, i));
    }
    return theta;
  }

  double chi2(const std::vector<double>& theta) const {
    DecayModel m = model(theta);
    double s = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      double r = data.y[k] - m.evaluate(data.x[k]);
      s += data.w[k] * r * r;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
  }
};

std::vector<double> nelder_mead(const Problem& pr, std::vector<double> start, int max_iter, double tol, int& iters) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> s(n + 1, start);
  for (std::size_t j = 0; j < n; ++j) s[j + 1][j] = start[j] != 0.0 ? start[j] * 1.5 : 0.05;
  std::vector<double> f(n + 1);
  for (std::size_t j = 0; j <= n; ++j) f[j] = pr.chi2(s[j]);
  std::vector<std::size_t> order(n + 1);
  for (iters = 0; iters < max_iter; ++iters) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::abs(f[worst] - f[best]) <= tol * (1.0 + std::abs(f[best]))) break;
    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j <= n; ++j)
      if (j != worst)
        for (std::size_t d = 0; d < n; ++d) c[d] += s[j][d] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = c[d] + t * (s[worst][d] - c[d]);
      return pr.clamp(p);
    };
    auto xr = along(-1.0);
    double fr = pr.chi2(xr);
    if (fr < f[best]) {
      auto xe = along(-2.0);
      double fe = pr.chi2(xe);
      if (fe < fr) s[worst] = xe, f[worst] = fe;
      else s[worst] = xr, f[worst] = fr;
    } else if (fr < f[second]) {
      s[worst] = xr;
      f[worst] = fr;
    } else {
      auto xc = fr < f[worst] ? along(-0.5) : along(0.5);
      double fc = pr.chi2(xc);
      if (fc < std::min(fr, f[worst])) {
        s[worst] = xc;
        f[worst] = fc;
      } else {
        for (std::size_t j = 0; j <= n; ++j) {
          if (j == best) continue;
          for (std::size_t d = 0; d < n; ++d) s[j][d] = s[best][d] + 0.5 * (s[j][d] - s[best][d]);
          s[j] = pr.clamp(s[j]);
          f[j] = pr.chi2(s[j]);
        }
      }
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  return s[best];
}

void normal_equations(const Problem& pr, const std::vector<double>& theta, Eigen::MatrixXd& A, Eigen::VectorXd& g) {
  const std::size_t n = theta.size();
  DecayModel m = pr.model(theta);
  A = Eigen::MatrixXd::Zero(n, n);
  g = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < pr.data.size(); ++k) {
    auto jac = m.jacobian(pr.data.x[k]);
    Eigen::VectorXd J(n);
    for (std::size_t j = 0; j < n; ++j) J[j] = jac[pr.free_idx[j]];
    const double r = pr.data.y[k] - m.evaluate(pr.data.x[k]);
    A += pr.data.w[k] * J * J.transpose();
    g += pr.data.w[k] * r * J;
  }
}

// Levenberg-Marquardt refinement; returns true on convergence.
bool refine(const Problem& pr, std::vector<double>& theta, int max_iter, double tol, int& iters) {
  const std::size_t n = theta.size();
  double lambda = 1e-3, f = pr.chi2(theta);
  for (iters = 0; iters < max_iter; ++iters) {
    Eigen::MatrixXd A;
    Eigen::VectorXd g;
    normal_equations(pr, theta, A, g);
    bool improved = false;
    while (lambda < 1e14) {
      Eigen::MatrixXd M = A;
      for (std::size_t j = 0; j < n; ++j) M(j, j) += lambda * std::max(A(j, j), 1e-12);
      Eigen::VectorXd step = M.ldlt().solve(g);
      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = theta[j] + step[j];
      trial = pr.clamp(trial);
      const double ft = pr.chi2(trial);
      if (ft <= f) {
        double moved = 0.0;
        for (std::size_t j = 0; j < n; ++j) moved = std::max(moved, std::abs(trial[j] - theta[j]) / (std::abs(theta[j]) + 1e-12));
        const double drop = f - ft;
        theta = trial;
        f = ft;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (drop <= tol * (1.0 + f) && moved < 1e-9) return true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) return true;  // no descent direction left within the bounds
  }
  return false;
}

std::vector<double> initial_guess(const FitData& d, ModelKind kind) {
  std::size_t i0 = static_cast<std::size_t>(std::min_element(d.x.begin(), d.x.end()) - d.x.begin());
  std::size_t i1 = static_cast<std::size_t>(std::max_element(d.x.begin(), d.x.end()) - d.x.begin());
  const double x_max = std::max(d.x[i1], 1e-9);
  if (kind == ModelKind::Retention) {
    double y = std::clamp(d.y[i1], 1e-6, 1.0);
    return {std::max(-std::log(y) / x_max, 1e-6)};
  }
  const double eps = std::clamp(1.0 - d.y[i0], 0.0, 0.45);
  const double amp = 0.5 - eps;
  // point of steepest relative decay reached by the data
  double x_char = x_max;
  for (std::size_t k = 0; k < d.size(); ++k) {
    double frac = (d.y[k] - 0.5) / amp;
    if (frac < std::exp(-1.0) && d.x[k] > 0 && d.x[k] < x_char) x_char = d.x[k];
  }
  if (kind == ModelKind::QecCycles) {
    double frac = std::clamp((d.y[i1] - 0.5) / amp, 1e-6, 1.0);
    double em = 0.5 * (1.0 - std::pow(frac, 1.0 / x_max));
    return {eps, std::clamp(em, 1e-4, 0.45)};
  }
  return {eps, 0.5 / x_char, 1.0 / x_char};
}

}  // namespace

FitResult fit(const FitData& data, ModelKind kind, const FitOptions& opt) {
  const std::size_t np = DecayModel::num_params(kind);
  if (data.size() < 3) throw FitError("fit needs at least 3 points with nonzero weight");
  if (!opt.pinned.empty() && opt.pinned.size() != np) throw FitError("pin list does not match the model");
  for (std::size_t k = 0; k < data.size(); ++k)
    if (!std::isfinite(data.x[k]) || !std::isfinite(data.y[k]) || !(data.w[k] > 0))
      throw FitError("non-finite data or non-positive weight");

  std::vector<double> guess = initial_guess(data, kind);
  Problem pr{data, kind, guess, {}};
  for (std::size_t i = 0; i < np; ++i) {
    if (!opt.pinned.empty() && opt.pinned[i]) {
      pr.base[i] = *opt.pinned[i];
      if (pr.base[i] < DecayModel::lower_bound(kind, i) || pr.base[i] > DecayModel::upper_bound(kind, i))
        throw FitError("pinned value out of range for " + DecayModel::param_names(kind)[i]);
    } else {
      pr.free_idx.push_back(i);
    }
  }
  FitResult res;
  res.free.assign(np, false);
  for (auto i : pr.free_idx) res.free[i] = true;
  if (pr.free_idx.empty()) {
    res.model = pr.model({});
    res.chi2 = pr.chi2({});
    res.dof = static_cast<int>(data.size());
    res.stderr_.assign(np, 0.0);
    res.covariance.assign(np, std::vector<double>(np, 0.0));
    return res;
  }

  std::vector<double> best;
  double best_f = std::numeric_limits<double>::infinity();
  int nm_iters = 0;
  for (double scale : {1.0, 0.3, 3.0}) {
    std::vector<double> start;
    for (auto i : pr.free_idx) start.push_back(i == 0 && kind != ModelKind::Retention ? guess[i] : guess[i] * scale);
    int it = 0;
    auto th = nelder_mead(pr, pr.clamp(start), opt.max_simplex_iterations, opt.tolerance, it);
    nm_iters += it;
    double f = pr.chi2(th);
    if (f < best_f) {
      best_f = f;
      best = th;
    }
  }
  int lm_iters = 0;
  const bool converged = refine(pr, best, opt.max_refine_iterations, opt.tolerance, lm_iters);
  res.iterations = nm_iters + lm_iters;
  std::ostringstream diag;
  diag << "simplex iterations " << nm_iters << ", refinement iterations " << lm_iters << ", chi2 " << pr.chi2(best);
  res.diagnostics = diag.str();
  if (!converged) throw FitError("fit did not converge: " + res.diagnostics);

  res.model = pr.model(best);
  res.chi2 = pr.chi2(best);
  res.dof = static_cast<int>(data.size()) - static_cast<int>(pr.free_idx.size());
  Eigen::MatrixXd A;
  Eigen::VectorXd g;
  normal_equations(pr, best, A, g);
  Eigen::MatrixXd cov = A.completeOrthogonalDecomposition().pseudoInverse();
  res.covariance.assign(np, std::vector<double>(np, 0.0));
  res.stderr_.assign(np, 0.0);
  for (std::size_t a = 0; a < pr.free_idx.size(); ++a) {
    for (std::size_t b = 0; b < pr.free_idx.size(); ++b) res.covariance[pr.free_idx[a]][pr.free_idx[b]] = cov(a, b);
    res.stderr_[pr.free_idx[a]] = std::sqrt(std::max(0.0, cov(a, a)));
  }
  for (auto i : pr.free_idx) {
    const double v = res.model.params[i];
    const double lo = DecayModel::lower_bound(kind, i), hi = DecayModel::upper_bound(kind, i);
    if (std::abs(v - lo) <= 1e-9 * (1.0 + std::abs(lo)) || std::abs(v - hi) <= 1e-9 * (1.0 + std::abs(hi)))
      res.boundary = true;
  }
  return res;
}

// -------------------------------------------------------------- lifetimes

LifetimeSolve lifetime(const DecayModel& model, double threshold, double tau, double horizon) {
  if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
  model.validate();
  auto f = [&](double t) { return model.evaluate(model.kind == ModelKind::QecCycles ? t / tau : t); };
  LifetimeSolve out;
  if (f(0.0) <= threshold) {
    out.below_at_start = true;
    return out;
  }
  double lo = 0.0, hi = std::min(1.0, horizon);
  while (f(hi) > threshold) {
    lo = hi;
    if (hi >= horizon) {
      out.unbounded = true;
      out.seconds = horizon;
      return out;
    }
    hi = std::min(2.0 * hi, horizon);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > threshold) lo = mid;
    else hi = mid;
  }
  out.seconds = 0.5 * (lo + hi);
  return out;
}

LifetimeSolve integrity_lifetime(const DecayModel& p_worst_model, double tau, double horizon) {
  return lifetime(p_worst_model, 0.5 + 0.5 * kIntegrityThreshold, tau, horizon);
}

void fill_improvements(std::vector<LifetimeEntry>& entries) {
  if (entries.empty()) return;
  const LifetimeEntry& ref = entries.front();
  for (auto& e : entries) {
    e.process_improvement = ref.process.seconds > 0 ? e.process.seconds / ref.process.seconds : 0.0;
    if (e.integrity && ref.integrity && ref.integrity->seconds > 0)
      e.integrity_improvement = e.integrity->seconds / ref.integrity->seconds;
  }
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

nlohmann::ordered_json solve_json(const LifetimeSolve& s) {
  return {{"seconds", s.seconds}, {"unbounded", s.unbounded}, {"below_at_start", s.below_at_start}};
}

}  // namespace

std::string table1_csv(const std::vector<LabeledFit>& fits) {
  std::ostringstream os;
  os << "label,model,parameter,value,stderr,pinned,boundary\n";
  for (const auto& f : fits) {
    const auto& m = f.result.model;
    auto names = DecayModel::param_names(m.kind);
    for (std::size_t i = 0; i < names.size(); ++i)
      os << f.label << ',' << model_kind_name(m.kind) << ',' << names[i] << ',' << num(m.params[i]) << ','
         << num(f.result.stderr_[i]) << ',' << (f.result.free[i] ? 0 : 1) << ',' << (f.result.boundary ? 1 : 0) << '\n';
    if (m.kind == ModelKind::PhysDfs) {
      // width in the 2^(-1/2) Gamma normalization
      os << f.label << ",phys_dfs,Gamma_over_sqrt2," << num(m.params[2] / std::sqrt(2.0)) << ','
         << num(f.result.stderr_[2] / std::sqrt(2.0)) << ',' << (f.result.free[2] ? 0 : 1) << ','
         << (f.result.boundary ? 1 : 0) << '\n';
    } else if (m.kind == ModelKind::QecCycles) {
      os << f.label << ",qec_cycles,rate_2eps_m_over_tau," << num(2.0 * m.params[1] / f.tau) << ','
         << num(2.0 * f.result.stderr_[1] / f.tau) << ',' << (f.result.free[1] ? 0 : 1) << ','
         << (f.result.boundary ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string lifetime_json(std::vector<LifetimeEntry> entries) {
  fill_improvements(entries);
  nlohmann::ordered_json j;
  j["process_threshold"] = kProcessThreshold;
  j["integrity_threshold"] = kIntegrityThreshold;
  j["reference"] = entries.empty() ? "" : entries.front().label;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json x;
    x["label"] = e.label;
    x["process"] = solve_json(e.process);
    x["process_improvement"] = e.process_improvement;
    if (e.integrity) {
      x["integrity"] = solve_json(*e.integrity);
      if (e.integrity_improvement) x["integrity_improvement"] = *e.integrity_improvement;
    }
    arr.push_back(x);
  }
  j["entries"] = arr;
  return j.dump(2) + "\n";
}

SummaryFit fit_summary(const std::string& summary_json, const std::string& label) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(summary_json);
  } catch (const nlohmann::json::exception& e) {
    throw FitError(std::string("summary is not valid JSON: ") + e.what());
  }
  if (!j.contains("fit_input") || !j.contains("kind") || !j.contains("mode"))
    throw FitError("summary lacks kind, mode or fit_input");
  const auto& in = j["fit_input"];
  const ModelKind kind = parse_model_kind(in.at("model").get<std::string>());
  const double tau = kind == ModelKind::QecCycles ? j.at("tau_cycle").get<double>() : 1.0;

  SummaryFit out;
  out.label = label;
  if (out.label.empty()) {
    out.label = j["kind"].get<std::string>();
    if (j["mode"].get<std::string>() == "post-select") out.label += "_ps";
  }
  auto xs = [](const nlohmann::json& a) { return a.get<std::vector<double>>(); };
  auto ks = [](const nlohmann::json& a) { return a.get<std::vector<std::uint64_t>>(); };

  for (const auto& st : in.at("states")) {
    const std::string name = st.at("label").get<std::string>();
    const char basis = name == "0" || name == "1" ? 'Z' : (name == "+" || name == "-") ? 'X' : 'Y';
    FitData d = FitData::binomial(xs(st.at("x")), ks(st.at("k")), ks(st.at("n")));
    if (d.size() < 3) continue;
    out.fits.push_back({out.label + ":" + name, fit(d, kind, default_fit_options(kind, basis)), tau});
  }
  if (!in.contains("F_p")) throw FitError("summary for " + out.label + " has no process-fidelity series");
  auto series = [&](const nlohmann::json& s) {
    return FitData::from_sigma(xs(s.at("x")), xs(s.at("y")), xs(s.at("sigma")));
  };
  LabeledFit fp{out.label + ":F_p", fit(series(in["F_p"]), kind), tau};
  out.lifetimes.label = out.label;
  out.lifetimes.process = lifetime(fp.result.model, kProcessThreshold, tau);
  out.fits.push_back(fp);
  if (in.contains("p_worst")) {
    LabeledFit pw{out.label + ":p_worst", fit(series(in["p_worst"]), kind), tau};
    out.lifetimes.integrity = integrity_lifetime(pw.result.model, tau);
    out.fits.push_back(pw);
  }
  if (in.contains("retention")) {
    const auto& r = in["retention"];
    out.fits.push_back(
        {out.label + ":retention", fit(FitData::binomial(xs(r.at("x")), ks(r.at("k")), ks(r.at("n"))), ModelKind::Retention),
         1.0});
  }
  return out;
}

}  // namespace dfsqec
