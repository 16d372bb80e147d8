#include "dfsqec/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dfsqec/rng.hpp"

namespace dfsqec {

QubitKind parse_qubit_kind(const std::string& s) {
  if (s == "physical") return QubitKind::Physical;
  if (s == "dfs") return QubitKind::Dfs;
  if (s == "dfs_qec" || s == "dfs-qec") return QubitKind::DfsQec;
  throw std::invalid_argument("unknown qubit kind '" + s + "' (expected physical, dfs or dfs_qec)");
}

const char* qubit_kind_name(QubitKind k) {
  switch (k) {
    case QubitKind::Physical: return "physical";
    case QubitKind::Dfs: return "dfs";
    case QubitKind::DfsQec: return "dfs_qec";
  }
  return "?";
}

// ------------------------------------------------------------------- plan

std::size_t ExperimentPlan::num_points() const { return kind == QubitKind::DfsQec ? cycles.size() : times.size(); }

double ExperimentPlan::time_of(std::size_t i) const {
  return kind == QubitKind::DfsQec ? cycles.at(i) * noise.tau_cycle : times.at(i);
}

int ExperimentPlan::cycles_of(std::size_t i) const { return kind == QubitKind::DfsQec ? cycles.at(i) : 0; }

void ExperimentPlan::validate() const {
  if (states.empty()) throw std::invalid_argument("plan has no states");
  if (shots < 1) throw std::invalid_argument("plan needs at least one shot");
  if (num_points() == 0) throw std::invalid_argument(kind == QubitKind::DfsQec ? "plan has no cycle counts" : "plan has no times");
  for (double t : times)
    if (!(t >= 0) || !std::isfinite(t)) throw std::invalid_argument("times must be finite and non-negative");
  for (int n : cycles)
    if (n < 0) throw std::invalid_argument("cycle counts must be non-negative");
  if (zone_batch < 1) throw std::invalid_argument("zone_batch must be positive");
  noise.validate();
  if (engine == EngineKind::Clifford && noise.effective_Gamma() > 0 && !noise.twirl_quasi_static)
    throw CapabilityError("coherent quasi-static dephasing needs the state-vector engine (or twirl_quasi_static=true)");
  if (engine == EngineKind::StateVector && kind == QubitKind::DfsQec && layout == AncillaLayout::Full)
    throw CapabilityError("the state-vector engine runs the QEC cycle with the compact ancilla layout only");
}

// -------------------------------------------------------------- statistics

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

PointCounts& PointCounts::operator+=(const PointCounts& o) {
  total += o.total;
  survivors += o.survivors;
  accepted += o.accepted;
  accepted_survivors += o.accepted_survivors;
  ambiguous_cycles += o.ambiguous_cycles;
  hook_corrections += o.hook_corrections;
  leak_events += o.leak_events;
  return *this;
}

std::uint64_t MemoryPoint::survivors(DecodeMode m) const {
  return m == DecodeMode::PostSelect ? counts.accepted_survivors : counts.survivors;
}
std::uint64_t MemoryPoint::denominator(DecodeMode m) const {
  return m == DecodeMode::PostSelect ? counts.accepted : counts.total;
}
std::uint64_t MemoryPoint::failures(DecodeMode m) const { return denominator(m) - survivors(m); }
std::uint64_t MemoryPoint::rejected(DecodeMode m) const {
  return m == DecodeMode::PostSelect ? counts.total - counts.accepted : 0;
}
double MemoryPoint::p(DecodeMode m) const {
  std::uint64_t d = denominator(m);
  return d == 0 ? std::nan("") : static_cast<double>(survivors(m)) / static_cast<double>(d);
}
Interval MemoryPoint::ci(DecodeMode m) const { return wilson_interval(survivors(m), denominator(m)); }

const MemoryPoint* MemoryResult::find(LogicalState s, std::size_t time_index) const {
  const std::size_t n = plan.num_points();
  for (std::size_t i = 0; i < plan.states.size(); ++i)
    if (plan.states[i] == s) return &points[i * n + time_index];
  return nullptr;
}

// ----------------------------------------------------------------- shots

namespace {

void rotate_to(Circuit& c, LogicalState s, int q) {
  switch (s) {
    case LogicalState::Zero: break;
    case LogicalState::One: c.x(q); break;
    case LogicalState::Plus: c.h(q); break;
    case LogicalState::Minus: c.x(q).h(q); break;
    case LogicalState::PlusI: c.h(q).s(q); break;
    case LogicalState::MinusI: c.h(q).sdg(q); break;
  }
}

// Inverse rotation; |1> is measured directly so a leaked qubit reads as surviving.
void rotate_back(Circuit& c, LogicalState s, int q) {
  switch (s) {
    case LogicalState::Zero:
    case LogicalState::One: break;
    case LogicalState::Plus: c.h(q); break;
    case LogicalState::Minus: c.h(q).x(q); break;
    case LogicalState::PlusI: c.sdg(q).h(q); break;
    case LogicalState::MinusI: c.s(q).h(q); break;
  }
}

std::uint64_t expected_bit(LogicalState s) { return s == LogicalState::One ? 1 : 0; }

Circuit physical_circuit(LogicalState s, double t) {
  Circuit c(1);
  c.add_register("m", 1);
  c.prep(0);
  rotate_to(c, s, 0);
  if (t > 0) c.idle({0}, t);
  rotate_back(c, s, 0);
  c.measure('Z', 0, "m", 0);
  return c;
}

Circuit dfs_circuit(LogicalState s, double t) {
  Circuit c(10);
  c.add_register("m", 5);
  for (int i = 0; i < 5; ++i) {
    c.prep(2 * i).prep(2 * i + 1);
    rotate_to(c, s, 2 * i);
    c.cnot(2 * i, 2 * i + 1).x(2 * i + 1);
  }
  std::vector<int> all(10);
  for (int q = 0; q < 10; ++q) all[q] = q;
  if (t > 0) c.idle(all, t);
  for (int i = 0; i < 5; ++i) {
    c.x(2 * i + 1).cnot(2 * i, 2 * i + 1);
    rotate_back(c, s, 2 * i);
    c.measure('Z', 2 * i, "m", i);
  }
  return c;
}

struct Context {
  const ExperimentPlan& plan;
  const QecProtocol* protocol = nullptr;
  ZoneAssignment zones;
  std::vector<std::vector<Circuit>> circuits;  // [state][point] for physical and dfs
  std::vector<Circuit> init;                   // [state] for dfs_qec
  std::array<Circuit, 3> readout;              // Z, X, Y
  const Circuit* cycle = nullptr;

  Context(const ExperimentPlan& p, const QecProtocol* proto) : plan(p), protocol(proto) {
    const int nq = p.kind == QubitKind::Physical ? 1 : p.kind == QubitKind::Dfs ? 10 : proto->num_qubits();
    zones = ZoneAssignment::standard(nq, p.kind == QubitKind::Physical ? 0 : 10, p.noise, p.kind != QubitKind::Physical);
    if (p.kind == QubitKind::DfsQec) {
      for (auto s : p.states) init.push_back(proto->init_circuit(s));
      readout = {proto->readout_circuit('Z'), proto->readout_circuit('X'), proto->readout_circuit('Y')};
      double idle = std::max(0.0, p.noise.tau_cycle - proto->se_duration(p.noise));
      cycle = &proto->cycle_circuit(idle);
    } else {
      for (auto s : p.states) {
        std::vector<Circuit> row;
        for (std::size_t i = 0; i < p.num_points(); ++i)
          row.push_back(p.kind == QubitKind::Physical ? physical_circuit(s, p.times[i]) : dfs_circuit(s, p.times[i]));
        circuits.push_back(std::move(row));
      }
    }
  }

  int samples_per_shot() const { return plan.kind == QubitKind::Dfs ? 5 : 1; }

  // Adds one shot's contribution to `out`.
  void shot(std::size_t si, std::size_t point, std::uint64_t shot, PointCounts& out) const {
    const LogicalState s = plan.states[si];
    const std::uint64_t sk = static_cast<std::uint64_t>(s);
    const std::uint64_t zone_key =
        plan.noise.redraw == RedrawPolicy::PerShot ? shot : shot / static_cast<std::uint64_t>(plan.zone_batch);
    Rng zr = make_rng(derive_seed(plan.seed, {kZoneStream, sk, point, zone_key}));
    Rng nr = make_rng(derive_seed(plan.seed, {kNoiseStream, sk, point, shot}));
    Rng tr = make_rng(derive_seed(plan.seed, {kTieBreakStream, sk, point, shot}));
    const bool noisy = !plan.noise.is_noiseless();
    std::optional<ShotNoise> noise;
    if (noisy) noise.emplace(plan.noise, zones, sample_quasi_static(plan.noise, zones, zr));
    ExecOptions opt;
    opt.noise = noise ? &*noise : nullptr;

    if (plan.kind != QubitKind::DfsQec) {
      const Circuit& c = circuits[si][point];
      Machine m(plan.engine, c.num_qubits());
      ShotRecord rec;
      execute(c, m, rec, nr, opt);
      const std::uint64_t bits = rec.value(c, "m");
      const int k = samples_per_shot();
      int ok = 0;
      for (int i = 0; i < k; ++i) ok += ((bits >> i) & 1u) == expected_bit(s);
      out.total += k;
      out.survivors += ok;
      out.accepted += k;
      out.accepted_survivors += ok;
      return;
    }

    Machine m(plan.engine, protocol->num_qubits());
    ShotRecord rec;
    execute(init[si], m, rec, nr, opt);
    bool accepted = true;
    for (int n = 0; n < plan.cycles[point]; ++n) {
      auto res = protocol->qec_cycle(m, *cycle, opt.noise, nr, tr);
      if (res.outcome.ambiguous) ++out.ambiguous_cycles;
      if (res.outcome.from_hook_table) ++out.hook_corrections;
      out.leak_events += static_cast<std::uint64_t>(__builtin_popcount(res.record.leak_detected));
      if (res.postselect.rejected) accepted = false;
    }
    const char basis = state_basis(s);
    const Circuit& ro = readout[basis == 'Z' ? 0 : basis == 'X' ? 1 : 2];
    execute(ro, m, rec, nr, opt);
    const bool survived = protocol->readout_parity(ro, rec, basis) == (state_is_negative(s) ? 1 : 0);
    out.total += 1;
    out.survivors += survived;
    out.accepted += accepted;
    out.accepted_survivors += accepted && survived;
  }
};

std::unique_ptr<QecProtocol> protocol_for(const ExperimentPlan& plan) {
  if (plan.kind != QubitKind::DfsQec) return nullptr;
  return std::make_unique<QecProtocol>(ProtocolOptions{true, plan.layout});
}

}  // namespace

ShotOutcome run_memory_shot(const ExperimentPlan& plan, const QecProtocol* protocol, LogicalState state,
                            std::size_t point, std::uint64_t shot) {
  plan.validate();
  std::unique_ptr<QecProtocol> own;
  if (plan.kind == QubitKind::DfsQec && !protocol) {
    own = protocol_for(plan);
    protocol = own.get();
  }
  ExperimentPlan single = plan;
  single.states = {state};
  Context ctx(single, protocol);
  PointCounts c;
  ctx.shot(0, point, shot, c);
  ShotOutcome o;
  o.survived = c.survivors == c.total;
  o.accepted = c.accepted == c.total;
  o.ambiguous_cycles = static_cast<int>(c.ambiguous_cycles);
  o.hook_corrections = static_cast<int>(c.hook_corrections);
  o.leak_events = static_cast<int>(c.leak_events);
  return o;
}

MemoryResult run_memory(const ExperimentPlan& plan) {
  const auto t0 = std::chrono::steady_clock::now();
  plan.validate();
  auto protocol = protocol_for(plan);
  Context ctx(plan, protocol.get());

  const std::size_t npts = plan.num_points(), nstates = plan.states.size();
  constexpr std::uint64_t kChunk = 64;
  const std::uint64_t chunks = (plan.shots + kChunk - 1) / kChunk;
  const std::size_t units = nstates * npts * chunks;
  std::vector<PointCounts> partial(units);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units) return;
      const std::size_t si = u / (npts * chunks), pi = (u / chunks) % npts;
      const std::uint64_t ci = u % chunks;
      try {
        for (std::uint64_t shot = ci * kChunk; shot < std::min(plan.shots, (ci + 1) * kChunk); ++shot)
          ctx.shot(si, pi, shot, partial[u]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(units);
        return;
      }
    }
  };
  unsigned workers = plan.workers ? plan.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, units));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  MemoryResult res;
  res.plan = plan;
  for (std::size_t si = 0; si < nstates; ++si)
    for (std::size_t pi = 0; pi < npts; ++pi) {
      MemoryPoint pt;
      pt.state = plan.states[si];
      pt.time = plan.time_of(pi);
      pt.cycles = plan.cycles_of(pi);
      for (std::uint64_t ci = 0; ci < chunks; ++ci) pt.counts += partial[(si * npts + pi) * chunks + ci];
      res.points.push_back(pt);
    }
  if (protocol) {
    res.se_duration = protocol->se_duration(plan.noise);
    res.idle_per_cycle = std::max(0.0, plan.noise.tau_cycle - res.se_duration);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------- metrics

namespace {

constexpr std::array<std::array<LogicalState, 2>, 3> kBases = {{{LogicalState::Zero, LogicalState::One},
                                                                {LogicalState::Plus, LogicalState::Minus},
                                                                {LogicalState::PlusI, LogicalState::MinusI}}};

}  // namespace

MetricRow metrics_from_probabilities(const std::map<LogicalState, double>& p, bool assume_orthogonal,
                                     const std::map<LogicalState, double>* sigma) {
  MetricRow row;
  double sum = 0.0, var_fa = 0.0;
  row.p_worst = 2.0;
  for (const auto& basis : kBases) {
    std::array<double, 2> v{}, sd{};
    std::array<bool, 2> have{};
    for (int j = 0; j < 2; ++j) {
      auto it = p.find(basis[j]);
      have[j] = it != p.end() && std::isfinite(it->second);
      if (have[j]) {
        v[j] = it->second;
        if (sigma && sigma->count(basis[j])) sd[j] = sigma->at(basis[j]);
      }
    }
    if (!have[0] && !have[1])
      throw MetricError("no data for the " + std::string(1, state_basis(basis[0])) + " basis");
    double basis_var;
    if (!have[0] || !have[1]) {
      if (!assume_orthogonal)
        throw MetricError("state " + state_name(basis[have[0] ? 1 : 0]) +
                          " is missing (enable the orthogonal-state assumption to copy its partner)");
      int k = have[0] ? 0 : 1;
      row.assumed.push_back(basis[1 - k]);
      v[1 - k] = v[k];
      var_fa += 4 * sd[k] * sd[k];
      basis_var = sd[k] * sd[k];
    } else {
      var_fa += sd[0] * sd[0] + sd[1] * sd[1];
      basis_var = 0.25 * (sd[0] * sd[0] + sd[1] * sd[1]);
    }
    sum += v[0] + v[1];
    const double pb = 0.5 * (v[0] + v[1]);
    if (pb < row.p_worst) {
      row.p_worst = pb;
      row.sigma_p_worst = std::sqrt(basis_var);
    }
  }
  row.F_a = sum / 6.0;
  row.F_p = (3.0 * row.F_a - 1.0) / 2.0;
  row.R = 2.0 * std::abs(row.p_worst - 0.5);
  row.sigma_F_p = 1.5 * std::sqrt(var_fa) / 6.0;
  return row;
}

std::vector<MetricRow> compute_metrics(const MemoryResult& result, bool assume_orthogonal) {
  std::vector<MetricRow> rows;
  const DecodeMode mode = result.plan.mode;
  for (std::size_t i = 0; i < result.plan.num_points(); ++i) {
    std::map<LogicalState, double> p, sigma;
    for (auto s : result.plan.states) {
      const MemoryPoint* pt = result.find(s, i);
      const std::uint64_t n = pt->denominator(mode);
      if (n == 0) continue;
      p[s] = pt->p(mode);
      const double pl = (static_cast<double>(pt->survivors(mode)) + 1) / (static_cast<double>(n) + 2);
      sigma[s] = std::sqrt(pl * (1 - pl) / static_cast<double>(n));
    }
    MetricRow row = metrics_from_probabilities(p, assume_orthogonal, &sigma);
    row.time = result.plan.time_of(i);
    row.cycles = result.plan.cycles_of(i);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RetentionRow> retention(const MemoryResult& result) {
  if (result.plan.kind != QubitKind::DfsQec || result.plan.mode != DecodeMode::PostSelect)
    throw MetricError("retention needs a dfs_qec run in post-select mode");
  std::vector<RetentionRow> rows;
  for (std::size_t i = 0; i < result.plan.num_points(); ++i) {
    RetentionRow r;
    r.time = result.plan.time_of(i);
    r.cycles = result.plan.cycles_of(i);
    for (auto s : result.plan.states) {
      const MemoryPoint* pt = result.find(s, i);
      r.accepted += pt->counts.accepted;
      r.total += pt->counts.total;
    }
    r.fraction = r.total ? static_cast<double>(r.accepted) / static_cast<double>(r.total) : 1.0;
    r.ci = wilson_interval(r.accepted, r.total);
    r.per_cycle = r.cycles > 0 ? std::pow(r.fraction, 1.0 / r.cycles) : 1.0;
    rows.push_back(r);
  }
  return rows;
}

// ----------------------------------------------------------------- output

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string results_csv(const MemoryResult& result) {
  const DecodeMode mode = result.plan.mode;
  std::ostringstream os;
  os << "state,time_s,cycles,survivors,accepted,total,p,ci_lo,ci_hi\n";
  for (const auto& pt : result.points) {
    Interval ci = pt.ci(mode);
    os << state_name(pt.state) << ',' << num(pt.time) << ',' << pt.cycles << ',' << pt.survivors(mode) << ','
       << pt.counts.accepted << ',' << pt.counts.total << ',' << num(pt.p(mode)) << ',' << num(ci.lo) << ','
       << num(ci.hi) << '\n';
  }
  return os.str();
}

std::string results_json(const MemoryResult& result, bool assume_orthogonal) {
  using nlohmann::ordered_json;
  const ExperimentPlan& plan = result.plan;
  const DecodeMode mode = plan.mode;
  ordered_json j;
  j["kind"] = qubit_kind_name(plan.kind);
  j["mode"] = decode_mode_name(mode);
  j["engine"] = engine_kind_name(plan.engine);
  j["seed"] = plan.seed;
  j["shots"] = plan.shots;
  j["tau_cycle"] = plan.noise.tau_cycle;
  if (plan.kind == QubitKind::DfsQec) {
    j["se_duration"] = result.se_duration;
    j["idle_per_cycle"] = result.idle_per_cycle;
  }
  ordered_json noise = ordered_json::object();
  for (const auto& [k, v] : plan.noise.to_map()) noise[k] = v;
  j["noise"] = noise;

  ordered_json pts = ordered_json::array();
  for (const auto& pt : result.points) {
    Interval ci = pt.ci(mode);
    pts.push_back({{"state", state_name(pt.state)},
                   {"time_s", pt.time},
                   {"cycles", pt.cycles},
                   {"survivors", pt.survivors(mode)},
                   {"failures", pt.failures(mode)},
                   {"rejected", pt.rejected(mode)},
                   {"accepted", pt.counts.accepted},
                   {"total", pt.counts.total},
                   {"p", pt.p(mode)},
                   {"ci_lo", ci.lo},
                   {"ci_hi", ci.hi},
                   {"ambiguous_cycles", pt.counts.ambiguous_cycles},
                   {"hook_corrections", pt.counts.hook_corrections},
                   {"leak_events", pt.counts.leak_events}});
  }
  j["points"] = pts;

  ordered_json fit_input;
  fit_input["model"] = plan.kind == QubitKind::DfsQec ? "qec_cycles" : "phys_dfs";
  fit_input["x_unit"] = plan.kind == QubitKind::DfsQec ? "cycles" : "seconds";
  ordered_json series = ordered_json::array();
  for (auto s : plan.states) {
    ordered_json x = ordered_json::array(), k = ordered_json::array(), n = ordered_json::array();
    for (std::size_t i = 0; i < plan.num_points(); ++i) {
      const MemoryPoint* pt = result.find(s, i);
      x.push_back(plan.kind == QubitKind::DfsQec ? static_cast<double>(pt->cycles) : pt->time);
      k.push_back(pt->survivors(mode));
      n.push_back(pt->denominator(mode));
    }
    series.push_back({{"label", state_name(s)}, {"x", x}, {"k", k}, {"n", n}});
  }
  fit_input["states"] = series;

  try {
    auto rows = compute_metrics(result, assume_orthogonal);
    ordered_json m = ordered_json::array();
    ordered_json x = ordered_json::array(), fp = ordered_json::array(), sfp = ordered_json::array(),
                 pw = ordered_json::array(), spw = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json assumed = ordered_json::array();
      for (auto s : r.assumed) assumed.push_back(state_name(s));
      m.push_back({{"time_s", r.time},
                   {"cycles", r.cycles},
                   {"F_a", r.F_a},
                   {"F_p", r.F_p},
                   {"p_worst", r.p_worst},
                   {"R", r.R},
                   {"sigma_F_p", r.sigma_F_p},
                   {"assumed", assumed}});
      x.push_back(plan.kind == QubitKind::DfsQec ? static_cast<double>(r.cycles) : r.time);
      fp.push_back(r.F_p);
      sfp.push_back(r.sigma_F_p);
      pw.push_back(r.p_worst);
      spw.push_back(r.sigma_p_worst);
    }
    j["metrics"] = m;
    fit_input["F_p"] = {{"x", x}, {"y", fp}, {"sigma", sfp}};
    fit_input["p_worst"] = {{"x", x}, {"y", pw}, {"sigma", spw}};
  } catch (const MetricError& e) {
    j["metrics_error"] = e.what();
  }
  if (plan.kind == QubitKind::DfsQec && mode == DecodeMode::PostSelect) {
    ordered_json r = ordered_json::array(), x = ordered_json::array(), k = ordered_json::array(),
                 n = ordered_json::array();
    for (const auto& row : retention(result)) {
      r.push_back({{"time_s", row.time},
                   {"cycles", row.cycles},
                   {"accepted", row.accepted},
                   {"total", row.total},
                   {"fraction", row.fraction},
                   {"ci_lo", row.ci.lo},
                   {"ci_hi", row.ci.hi},
                   {"per_cycle", row.per_cycle}});
      x.push_back(row.time);
      k.push_back(row.accepted);
      n.push_back(row.total);
    }
    j["retention"] = r;
    fit_input["retention"] = {{"x", x}, {"k", k}, {"n", n}};
  }
  j["fit_input"] = fit_input;
  return j.dump(2) + "\n";
}

}  // namespace dfsqec
