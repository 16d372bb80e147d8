#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfsqec/codes.hpp"
#include "dfsqec/config.hpp"
#include "dfsqec/decoder.hpp"
#include "dfsqec/experiments.hpp"
#include "dfsqec/fit.hpp"
#include "dfsqec/protocol.hpp"
#include "dfsqec/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dfsqec;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct OutputSet {
  fs::path dir;
  ordered_json files = ordered_json::array();

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << content;
    files.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a(content))}});
  }
};

ordered_json manifest_base(const std::string& command, const std::vector<std::string>& argv) {
  ordered_json m;
  m["tool"] = "dfsqec";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = argv;
  return m;
}

// ------------------------------------------------------------------ codes

int cmd_codes_verify(const std::string& name) {
  CodeSpec code;
  try {
    code = build_code(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep = verify_code(code);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << code_document(code, rep);
  if (name == "1014") {
    ConcatenationMap cm = dfs_in_513();
    std::cout << "concatenated_generators:\n";
    for (std::size_t i = 0; i < cm.outer.stabilizers.size(); ++i)
      std::cout << "  " << cm.outer.labels[i] << " -> " << cm.map(cm.outer.stabilizers[i]).str() << "\n";
  }
  std::printf("seconds: %.3f\n", secs);
  return rep.ok() ? 0 : 1;
}

// ----------------------------------------------------------------- decode

std::string outcome_text(const DecodeOutcome& o) {
  std::string out = o.correction.is_identity() ? "I" : o.correction.str();
  if (o.ambiguous) out += " ambiguous";
  if (o.rejected) out += " rejected";
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_decode(const std::vector<std::string>& records, const std::string& batch, const std::string& mode_name,
               std::uint64_t seed) {
  DecodeMode mode;
  try {
    mode = parse_decode_mode(mode_name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (records.empty() == batch.empty()) throw UsageError("give either a record or --batch FILE");
  QecProtocol protocol;
  const Decoder& dec = protocol.decoder();
  Rng rng = make_rng(derive_seed(seed, {kTieBreakStream}));

  auto parse = [](const std::string& text) {
    try {
      return SyndromeRecord::parse(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  };

  if (batch.empty()) {
    std::string text;
    for (const auto& r : records) text += (text.empty() ? "" : " ") + r;
    std::cout << outcome_text(dec.decode_full(parse(text), mode, rng)) << "\n";
    return 0;
  }
  std::ifstream file;
  std::istream* in = &std::cin;
  if (batch != "-") {
    file.open(batch);
    if (!file) throw UsageError("cannot read '" + batch + "'");
    in = &file;
  }
  std::cout << "record,correction,ambiguous,rejected,hook\n";
  std::string line;
  int lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string text = line.substr(b, e - b + 1);
    SyndromeRecord rec;
    try {
      rec = SyndromeRecord::parse(text);
    } catch (const std::invalid_argument& ex) {
      throw UsageError("line " + std::to_string(lineno) + ": " + ex.what());
    }
    DecodeOutcome o = dec.decode_full(rec, mode, rng);
    std::cout << csv_cell(text) << ',' << (o.correction.is_identity() ? "I" : o.correction.str()) << ','
              << (o.ambiguous ? 1 : 0) << ',' << (o.rejected ? 1 : 0) << ',' << (o.from_hook_table ? 1 : 0) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------- fault scan

int cmd_fault_scan(bool deflag, std::size_t pairs, const std::string& layout, std::uint64_t seed, double idle,
                   std::size_t max_reported) {
  ProtocolOptions opt;
  opt.flags = !deflag;
  if (layout == "full") opt.layout = AncillaLayout::Full;
  else if (layout == "compact") opt.layout = AncillaLayout::Compact;
  else throw UsageError("layout must be full or compact");
  QecProtocol protocol(opt);
  FaultScanOptions so;
  so.two_fault_samples = pairs;
  so.seed = seed;
  so.idle_duration = idle;
  so.max_reported = max_reported;
  FaultScanReport r = fault_scan(protocol, so);
  const auto& hb = protocol.hook_build();
  std::printf("layout: %s\nflags: %s\nqubits: %d\n", layout.c_str(), deflag ? "off" : "on", protocol.num_qubits());
  std::printf("locations: %zu\nactive_locations: %zu\n", r.locations, r.active_locations);
  std::printf("violations: %zu\nlogical_failures: %zu\n", r.violations, r.logical_failures);
  std::printf("condition_a: %s\ncondition_b: %s\n", r.condition_a ? "pass" : "FAIL", r.condition_b ? "pass" : "FAIL");
  std::printf("hook_faults: %zu\nhook_flagged: %zu\nhook_unflagged_high_weight: %zu\n", hb.faults_enumerated,
              hb.flagged_faults, hb.unflagged_high_weight);
  std::printf("hook_entries: %zu\nhook_conflicts: %zu\n", r.hook_entries, r.hook_conflicts);
  if (r.two_fault_runs > 0)
    std::printf("two_fault_runs: %zu\ntwo_fault_failures: %zu\ntwo_fault_failure_fraction: %.6g\n", r.two_fault_runs,
                r.two_fault_failures, static_cast<double>(r.two_fault_failures) / static_cast<double>(r.two_fault_runs));
  for (const auto& d : r.details) std::printf("detail: %s\n", d.c_str());
  std::printf("seconds: %.3f\nstatus: %s\n", r.seconds, r.ok() ? "ok" : "failed");
  return r.ok() ? 0 : 1;
}

// -------------------------------------------------------------------- run

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets, const std::string& seed_opt,
            const std::string& out_opt, const std::string& workers_opt, const std::vector<std::string>& argv) {
  Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
  for (const auto& s : sets) cfg.set(s);
  if (!seed_opt.empty()) cfg.set("run.seed", seed_opt);
  if (!out_opt.empty()) cfg.set("output.dir", out_opt);
  if (!workers_opt.empty()) cfg.set("run.workers", workers_opt);
  RunSpec spec = resolve_run(cfg);

  MemoryResult res = run_memory(spec.plan);

  OutputSet out{spec.out_dir};
  out.write("results.csv", results_csv(res));
  out.write("summary.json", results_json(res, spec.assume_orthogonal));
  const std::string resolved = resolved_config(spec).to_text();
  out.write("config.resolved", resolved);

  ordered_json m = manifest_base("run", argv);
  m["seed"] = spec.plan.seed;
  m["config"] = resolved;
  m["config_fnv1a64"] = hex64(fnv1a(resolved));
  m["wall_seconds"] = res.seconds;
  m["outputs"] = out.files;
  out.write("manifest.json", m.dump(2) + "\n");

  std::printf("kind: %s\nmode: %s\npoints: %zu\nshots: %llu\nseconds: %.2f\nout: %s\n",
              qubit_kind_name(spec.plan.kind), decode_mode_name(spec.plan.mode), res.points.size(),
              static_cast<unsigned long long>(spec.plan.shots), res.seconds, spec.out_dir.c_str());
  try {
    for (const auto& r : compute_metrics(res, spec.assume_orthogonal))
      std::printf("t=%-10.4g n=%-3d F_a=%.4f F_p=%.4f p_worst=%.4f R=%.4f\n", r.time, r.cycles, r.F_a, r.F_p,
                  r.p_worst, r.R);
  } catch (const MetricError& e) {
    std::printf("metrics: %s\n", e.what());
  }
  return 0;
}

// -------------------------------------------------------------------- fit

int cmd_fit(const std::vector<std::string>& inputs, const std::vector<std::string>& labels, const std::string& out_dir,
            const std::vector<std::string>& argv) {
  if (inputs.empty()) throw UsageError("fit needs at least one summary.json");
  if (!labels.empty() && labels.size() != inputs.size()) throw UsageError("give one --label per input or none");
  std::vector<LabeledFit> fits;
  std::vector<LifetimeEntry> entries;
  ordered_json sources = ordered_json::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string text = read_file(inputs[i]);
    SummaryFit sf = fit_summary(text, labels.empty() ? "" : labels[i]);
    fits.insert(fits.end(), sf.fits.begin(), sf.fits.end());
    entries.push_back(sf.lifetimes);
    sources.push_back({{"path", inputs[i]}, {"label", sf.label}, {"fnv1a64", hex64(fnv1a(text))}});
  }
  OutputSet out{out_dir};
  out.write("table1.csv", table1_csv(fits));
  const std::string lj = lifetime_json(entries);
  out.write("lifetimes.json", lj);
  ordered_json m = manifest_base("fit", argv);
  m["inputs"] = sources;
  m["outputs"] = out.files;
  out.write("manifest.json", m.dump(2) + "\n");

  fill_improvements(entries);
  for (const auto& e : entries) {
    std::printf("%-14s process_lifetime=%.4g s%s improvement=%.3g", e.label.c_str(), e.process.seconds,
                e.process.unbounded ? " (unbounded)" : "", e.process_improvement);
    if (e.integrity) std::printf(" integrity_lifetime=%.4g s", e.integrity->seconds);
    std::printf("\n");
  }
  return 0;
}

// ---------------------------------------------------------- bench decoder

int cmd_bench_decoder(std::uint64_t n, std::uint64_t seed, const std::string& mode_name, const std::string& out_dir,
                      const std::vector<std::string>& argv) {
  if (n == 0) throw UsageError("--n must be positive");
  DecodeMode mode;
  try {
    mode = parse_decode_mode(mode_name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  QecProtocol protocol;
  const Decoder& dec = protocol.decoder();
  Rng gen = make_rng(derive_seed(seed, {kSyntheticStream}));
  Rng tie = make_rng(derive_seed(seed, {kTieBreakStream}));
  std::vector<SyndromeRecord> records(std::min<std::uint64_t>(n, 1u << 16));
  for (auto& r : records) r = SyndromeRecord::from_syndrome9(static_cast<std::uint16_t>(gen() & 0x1FFu));

  std::vector<double> ns(n);
  std::uint64_t sink = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const SyndromeRecord& r = records[i % records.size()];
    auto t0 = std::chrono::steady_clock::now();
    DecodeOutcome o = dec.decode_full(r, mode, tie);
    auto t1 = std::chrono::steady_clock::now();
    sink += o.correction.x() ^ o.correction.z();
    ns[i] = std::chrono::duration<double, std::nano>(t1 - t0).count();
  }
  std::vector<double> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double f) { return sorted[static_cast<std::size_t>(f * static_cast<double>(n - 1))]; };
  double mean = 0;
  for (double v : ns) mean += v;
  mean /= static_cast<double>(n);
  const double median_us = q(0.5) / 1e3;

  // log2 buckets in nanoseconds
  std::vector<std::uint64_t> hist(40, 0);
  for (double v : ns) hist[std::min<std::size_t>(39, static_cast<std::size_t>(std::log2(std::max(1.0, v))))]++;

  std::printf("calls: %llu\nmode: %s\n", static_cast<unsigned long long>(n), decode_mode_name(mode));
  std::printf("median_us: %.4f\np90_us: %.4f\np99_us: %.4f\nmax_us: %.4f\nmean_us: %.4f\n", median_us, q(0.9) / 1e3,
              q(0.99) / 1e3, sorted.back() / 1e3, mean / 1e3);
  std::printf("histogram_ns:\n");
  ordered_json hj = ordered_json::array();
  for (std::size_t b = 0; b < hist.size(); ++b) {
    if (!hist[b]) continue;
    std::printf("  [%llu, %llu): %llu\n", 1ull << b, 1ull << (b + 1), static_cast<unsigned long long>(hist[b]));
    hj.push_back({{"lo_ns", 1ull << b}, {"hi_ns", 1ull << (b + 1)}, {"count", hist[b]}});
  }
  std::printf("target_us: 100\nstatus: %s\n", median_us < 100.0 ? "ok" : "failed");
  if (sink == 0xFFFFFFFFFFFFFFFFull) std::printf("\n");

  if (!out_dir.empty()) {
    OutputSet out{out_dir};
    ordered_json b;
    b["calls"] = n;
    b["mode"] = decode_mode_name(mode);
    b["median_us"] = median_us;
    b["p99_us"] = q(0.99) / 1e3;
    b["mean_us"] = mean / 1e3;
    b["histogram"] = hj;
    out.write("bench.json", b.dump(2) + "\n");
    ordered_json m = manifest_base("bench-decoder", argv);
    m["seed"] = seed;
    m["outputs"] = out.files;
    out.write("manifest.json", m.dump(2) + "\n");
  }
  return median_us < 100.0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Simulator, fault-tolerance verifier and decoder for the [[10,1,4]] DFS code"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* codes = app.add_subcommand("codes", "Code definitions");
  codes->require_subcommand(1);
  auto* verify = codes->add_subcommand("verify", "Verify a code by brute-force enumeration");
  std::string code_name;
  verify->add_option("code", code_name, "211, 513 or 1014")->required();

  auto* decode = app.add_subcommand("decode", "Decode syndrome records");
  std::vector<std::string> records;
  std::string batch, mode_name = "correct";
  std::uint64_t decode_seed = 1;
  decode->add_option("record", records, "e.g. r=10000 s=1001 flags=0000");
  decode->add_option("--batch", batch, "file with one record per line ('-' for stdin); writes CSV");
  decode->add_option("--mode", mode_name, "correct or post-select");
  decode->add_option("--seed", decode_seed, "tie-break seed");

  auto* scan = app.add_subcommand("fault-scan", "Exhaustive single-fault injection over a QEC cycle");
  bool deflag = false;
  std::size_t pairs = 0, max_reported = 20;
  std::string layout = "full";
  std::uint64_t scan_seed = 1;
  double idle = 1.0;
  scan->add_flag("--deflag", deflag, "remove flag qubits (negative control)");
  scan->add_option("--pairs", pairs, "sampled two-fault runs");
  scan->add_option("--layout", layout, "full or compact");
  scan->add_option("--seed", scan_seed, "seed for two-fault sampling");
  scan->add_option("--idle", idle, "idle duration before the cycle (s)");
  scan->add_option("--max-reported", max_reported, "violation details to print");

  auto* run = app.add_subcommand("run", "Memory experiment");
  std::string config_path, seed_opt, out_opt, workers_opt;
  std::vector<std::string> sets;
  run->add_option("--config", config_path, "config file");
  run->add_option("--set", sets, "section.key=value override")->allow_extra_args(false);
  run->add_option("--seed", seed_opt, "master seed");
  run->add_option("--out", out_opt, "output directory");
  run->add_option("--workers", workers_opt, "worker threads (0 = available parallelism)");

  auto* fitc = app.add_subcommand("fit", "Fit decay models to run summaries; the first input is the reference");
  std::vector<std::string> inputs, labels;
  std::string fit_out = "fit";
  fitc->add_option("summaries", inputs, "summary.json files")->required();
  fitc->add_option("--label", labels, "label per input")->allow_extra_args(false);
  fitc->add_option("--out", fit_out, "output directory");

  auto* bench = app.add_subcommand("bench-decoder", "Decoder latency benchmark on random records");
  std::uint64_t bench_n = 1000000, bench_seed = 1;
  std::string bench_mode = "correct", bench_out;
  bench->add_option("--n", bench_n, "number of decode calls");
  bench->add_option("--seed", bench_seed, "seed");
  bench->add_option("--mode", bench_mode, "correct or post-select");
  bench->add_option("--out", bench_out, "write bench.json and a manifest here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) return cmd_codes_verify(code_name);
    if (*decode) return cmd_decode(records, batch, mode_name, decode_seed);
    if (*scan) return cmd_fault_scan(deflag, pairs, layout, scan_seed, idle, max_reported);
    if (*run) return cmd_run(config_path, sets, seed_opt, out_opt, workers_opt, args);
    if (*fitc) return cmd_fit(inputs, labels, fit_out, args);
    if (*bench) return cmd_bench_decoder(bench_n, bench_seed, bench_mode, bench_out, args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
