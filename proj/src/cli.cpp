#include "phasesync/cli.hpp"

#include "phasesync/bench.hpp"
#include "phasesync/bundle.hpp"
#include "phasesync/chaossim.hpp"
#include "phasesync/connectivity.hpp"
#include "phasesync/parallel.hpp"
#include "phasesync/reproduce.hpp"
#include "phasesync/version.hpp"

#include "format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace phasesync::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Enough to re-execute the command: `phasesync rerun <manifest>`.
void write_manifest(const fs::path& path, const std::vector<std::string>& args, json config, json seeds,
                    const std::vector<fs::path>& outputs) {
  json m;
  m["command_line"] = args;
  m["config"] = std::move(config);
  m["seeds"] = std::move(seeds);
  m["version"] = kVersion;
  m["timestamp"] = utc_timestamp();
  std::vector<std::string> files;
  for (const auto& p : outputs) files.push_back(p.string());
  m["outputs"] = files;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << m.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::FormatError, "cannot write manifest " + path.string());
}

fs::path suffixed(const fs::path& base, const std::string& suffix) { return fs::path(base.string() + suffix); }

std::size_t resolve_threads(std::size_t requested) { return requested == 0 ? configured_threads() : requested; }

// ---------------------------------------------------------------------------

struct ConnectivityOptions {
  std::string input;
  std::string output;
  std::string metric = "plv";
  std::vector<double> band;
  std::vector<double> band_hz;
  double fs = 0.0;
  std::string mode = "samples";
  bool phasors = false;
  bool no_filter = false;
  std::size_t order = 2000;
  long pad = -1;
  double amp_floor = kDefaultAmplitudeFloor;
  std::size_t window = 400;
  std::size_t overlap = 200;
  std::size_t block_rows = 256;
  std::size_t threads = 0;
};

std::optional<BandSpec> resolve_band(const ConnectivityOptions& o, const std::optional<double>& bundle_fs) {
  if (!o.band.empty()) {
    BandSpec b{o.band[0], o.band[1]};
    b.validate();
    return b;
  }
  if (!o.band_hz.empty()) {
    const double fs = o.fs > 0.0 ? o.fs : bundle_fs.value_or(0.0);
    if (!(fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "--band-hz needs --fs or an fs entry in the bundle meta");
    return BandSpec::from_hz(o.band_hz[0], o.band_hz[1], fs);
  }
  return std::nullopt;
}

int cmd_connectivity(const ConnectivityOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const Metric metric = parse_metric(o.metric);
  if (o.mode != "samples" && o.mode != "trials") throw Error(ErrorCode::InvalidArgument, "--mode is samples or trials");
  const PlvMode mode = o.mode == "samples" ? PlvMode::OverSamples : PlvMode::OverTrials;
  const auto bundle = read_bundle(o.input);

  ConnectivityStack stack;
  json config = {{"input", o.input},     {"metric", o.metric},   {"mode", o.mode},
                 {"phasors", o.phasors}, {"no_filter", o.no_filter}, {"order", o.order},
                 {"amp_floor", o.amp_floor}, {"window", o.window}, {"overlap", o.overlap},
                 {"block_rows", o.block_rows}};

  if (metric == Metric::COH_MAX || metric == Metric::COH_MEAN) {
    if (o.phasors) throw Error(ErrorCode::InvalidArgument, "coherence needs real-valued epochs, not phasors");
    const RealEpochs x = to_real_epochs(bundle);
    const auto band = resolve_band(o, x.fs);
    if (!band) throw Error(ErrorCode::InvalidArgument, "coherence metrics need --band or --band-hz");
    config["band"] = {band->low, band->high};
    stack.push_back(coherence_matrix(x, {o.window, o.overlap}, *band,
                                     metric == Metric::COH_MAX ? BandMode::Max : BandMode::Mean));
  } else {
    AnalyticEpochs analytic;
    if (o.phasors) {
      analytic.data = to_complex_array(bundle);
    } else {
      const RealEpochs x = to_real_epochs(bundle);
      if (o.no_filter) {
        analytic = analytic_signal(x);
      } else {
        const auto band = resolve_band(o, x.fs);
        if (!band) throw Error(ErrorCode::InvalidArgument, "filtering needs --band or --band-hz (or --no-filter)");
        config["band"] = {band->low, band->high};
        const std::size_t pad = o.pad < 0 ? o.order : static_cast<std::size_t>(o.pad);
        config["pad"] = pad;
        analytic = bandpass_analytic(x, design_bandpass_fir(*band, o.order), pad);
      }
    }
    const auto phasors = normalize_phasors(analytic, o.amp_floor);
    GramOptions gram{o.block_rows, resolve_threads(o.threads)};
    for (const auto& c : complex_plv(phasors, mode, gram)) stack.push_back(derive_metric(c, metric));
  }

  const std::size_t nc = stack.front().n_signals;
  MatrixBundle result;
  result.dims = {stack.size(), nc, nc};
  result.dtype = DType::F64;
  result.axes = {"slice", "signal", "signal"};
  result.meta = {{"metric", std::string(to_string(metric))},
                 {"mode", o.mode},
                 {"n_observations", stack.front().n_observations}};
  result.real.reserve(stack.size() * nc * nc);
  for (const auto& m : stack) result.real.insert(result.real.end(), m.values.begin(), m.values.end());

  const fs::path base = bundle_base(o.output);
  write_bundle(base, result);

  std::ostringstream csv;
  csv << "slice,i,j,value\n";
  for (std::size_t k = 0; k < stack.size(); ++k)
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = 0; j < nc; ++j) csv << k << ',' << i << ',' << j << ',' << detail::fmt_double(stack[k](i, j)) << '\n';
  std::ofstream(suffixed(base, ".csv")) << csv.str();

  write_manifest(suffixed(base, ".manifest.json"), args, config, json::object(),
                 {suffixed(base, ".json"), suffixed(base, ".bin"), suffixed(base, ".csv")});
  out << "wrote " << stack.size() << " x " << nc << " x " << nc << ' ' << to_string(metric) << " to "
      << suffixed(base, ".bin").string() << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  RosslerLorenzConfig system;
  bool no_calibration_check = false;
  std::string output;
};

int cmd_simulate(const SimulateOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  RosslerLorenzConfig cfg = o.system;
  cfg.check_calibration = !o.no_calibration_check;
  const Trajectory tr = integrate_coupled(cfg);
  const std::size_t n = tr.size();

  MatrixBundle traj;
  traj.dims = {6, n};
  traj.dtype = DType::F64;
  traj.axes = {"variable", "sample"};
  traj.meta = {{"variables", {"x1", "y1", "z1", "x2", "y2", "z2"}}, {"coupling", cfg.coupling}, {"seed", cfg.seed}};
  for (const auto* v : {&tr.x1, &tr.y1, &tr.z1, &tr.x2, &tr.y2, &tr.z2}) traj.real.insert(traj.real.end(), v->begin(), v->end());

  auto [mx, my] = linear_mix(tr.x1, tr.x2, cfg.mixing);
  MatrixBundle mixed;
  mixed.dims = {2, n, 1};
  mixed.dtype = DType::F64;
  mixed.axes = {"signal", "sample", "trial"};
  mixed.meta = {{"signals", {"x1", "x2"}}, {"coupling", cfg.coupling}, {"mixing", cfg.mixing}, {"seed", cfg.seed}};
  mixed.real = std::move(mx);
  mixed.real.insert(mixed.real.end(), my.begin(), my.end());

  const fs::path base = bundle_base(o.output);
  const fs::path traj_base = suffixed(base, "_trajectory");
  const fs::path mixed_base = suffixed(base, "_mixed");
  write_bundle(traj_base, traj);
  write_bundle(mixed_base, mixed);

  json config = {{"a", cfg.a},
                 {"coupling", cfg.coupling},
                 {"mixing", cfg.mixing},
                 {"n_samples", cfg.n_samples},
                 {"burn_in", cfg.burn_in},
                 {"sample_interval", cfg.sample_interval},
                 {"substeps", cfg.substeps},
                 {"check_calibration", cfg.check_calibration}};
  write_manifest(suffixed(base, ".manifest.json"), args, config, {{"seed", cfg.seed}},
                 {suffixed(traj_base, ".bin"), suffixed(mixed_base, ".bin")});
  out << "wrote " << n << " samples to " << suffixed(traj_base, ".bin").string() << " and "
      << suffixed(mixed_base, ".bin").string() << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct ReproduceOptions {
  std::string figure;
  std::string scale = "fast";
  std::string out_dir = "reproduce_out";
  std::size_t threads = 0;
};

int cmd_reproduce(const ReproduceOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto scale = reproduce::parse_scale(o.scale);
  const std::size_t threads = resolve_threads(o.threads);
  const auto outcome = reproduce::reproduce_figure(o.figure, scale, o.out_dir, threads);

  json config = {{"figure", o.figure}, {"scale", o.scale}, {"threads", threads}};
  json seeds = json::object();
  if (o.figure != "fig1") seeds["base_seed"] = reproduce::mixing_sweep_config(scale).base_seed;
  else seeds["surrogate_seed"] = reproduce::bench_config(scale).seed;
  write_manifest(fs::path(o.out_dir) / (o.figure + ".manifest.json"), args, config, seeds, outcome.files);

  for (const auto& f : outcome.files) out << "wrote " << f.string() << '\n';
  for (const auto& c : outcome.criteria) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name << " = " << detail::fmt_double(c.value) << " (required "
        << c.threshold << ")\n";
  }
  return outcome.passed() ? kSuccess : kFailure;
}

// ---------------------------------------------------------------------------

struct BenchOptions {
  std::string config_path;
  std::vector<std::size_t> signals;
  std::vector<std::size_t> trials;
  std::size_t samples = 0;
  std::size_t repetitions = 0;
  std::vector<std::string> implementations;
  long reference_cap = -1;
  long threads = -1;
  long seed = -1;
  std::string output = "bench.csv";
  bool inject_mismatch = false;
};

bench::BenchConfig bench_config_from(const BenchOptions& o) {
  bench::BenchConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw Error(ErrorCode::FormatError, "cannot open " + o.config_path);
    json j;
    try {
      j = json::parse(in);
      if (j.contains("signal_counts")) cfg.signal_counts = j["signal_counts"].get<std::vector<std::size_t>>();
      if (j.contains("trial_counts")) cfg.trial_counts = j["trial_counts"].get<std::vector<std::size_t>>();
      if (j.contains("samples_per_trial")) cfg.samples_per_trial = j["samples_per_trial"].get<std::size_t>();
      if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<std::size_t>();
      if (j.contains("reference_cap")) cfg.reference_cap = j["reference_cap"].get<std::size_t>();
      if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("threads")) cfg.gram.threads = j["threads"].get<std::size_t>();
      if (j.contains("block_rows")) cfg.gram.block_rows = j["block_rows"].get<std::size_t>();
      if (j.contains("implementations")) {
        cfg.implementations.clear();
        for (const auto& name : j["implementations"].get<std::vector<std::string>>())
          cfg.implementations.push_back(bench::parse_implementation(name));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError, o.config_path + ": " + e.what());
    }
  }
  if (!o.signals.empty()) cfg.signal_counts = o.signals;
  if (!o.trials.empty()) cfg.trial_counts = o.trials;
  if (o.samples > 0) cfg.samples_per_trial = o.samples;
  if (o.repetitions > 0) cfg.repetitions = o.repetitions;
  if (o.reference_cap >= 0) cfg.reference_cap = static_cast<std::size_t>(o.reference_cap);
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads >= 0) cfg.gram.threads = resolve_threads(static_cast<std::size_t>(o.threads));
  if (!o.implementations.empty()) {
    cfg.implementations.clear();
    for (const auto& name : o.implementations) cfg.implementations.push_back(bench::parse_implementation(name));
  }
  if (o.inject_mismatch) {
    cfg.tamper = [](bench::Implementation impl, ConnectivityStack& out) {
      if (impl == bench::Implementation::Matrix && !out.empty() && out.front().n_signals > 1) out.front()(0, 1) += 0.5;
    };
  }
  return cfg;
}

int cmd_bench(const BenchOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto cfg = bench_config_from(o);
  const auto records = bench::run_benchmark(cfg);
  const auto report = bench::emit_report(records);

  const fs::path csv_path(o.output);
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  std::ofstream(csv_path) << report.csv;

  std::vector<std::string> impls;
  for (auto impl : cfg.implementations) impls.emplace_back(bench::to_string(impl));
  json config = {{"signal_counts", cfg.signal_counts}, {"trial_counts", cfg.trial_counts},
                 {"samples_per_trial", cfg.samples_per_trial}, {"repetitions", cfg.repetitions},
                 {"implementations", impls}, {"reference_cap", cfg.reference_cap},
                 {"threads", cfg.gram.threads}, {"block_rows", cfg.gram.block_rows}};
  write_manifest(suffixed(csv_path, ".manifest.json"), args, config, {{"seed", cfg.seed}}, {csv_path});
  out << report.summary;
  return kSuccess;
}

int cmd_rerun(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::FormatError, "cannot open " + manifest_path);
  std::vector<std::string> args;
  try {
    args = json::parse(in).at("command_line").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, manifest_path + ": " + e.what());
  }
  if (!args.empty() && args.front() == "rerun") throw Error(ErrorCode::FormatError, "manifest points at another rerun");
  return run(args, out, err);
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidBand:
    case ErrorCode::ShapeError:
    case ErrorCode::FormatError:
    case ErrorCode::WindowTooLong:
    case ErrorCode::EmptyBand:
    case ErrorCode::SignalTooShort:
    case ErrorCode::FactorTooLarge:
      return kUsage;
    default:
      return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-synchronization connectivity toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ConnectivityOptions conn;
  auto* c = app.add_subcommand("connectivity", "All-pairs connectivity from a matrix bundle");
  c->add_option("-i,--input", conn.input, "Input bundle (basename, .json or .bin)")->required();
  c->add_option("-o,--output", conn.output, "Output basename")->required();
  c->add_option("-m,--metric", conn.metric, "plv | iplv | ciplv | coh_max | coh_mean");
  c->add_option("--band", conn.band, "Band edges in rad/sample")->expected(2);
  c->add_option("--band-hz", conn.band_hz, "Band edges in Hz (needs --fs or meta.fs)")->expected(2);
  c->add_option("--fs", conn.fs, "Sampling rate in Hz");
  c->add_option("--mode", conn.mode, "samples (one matrix per trial) | trials (one per sample)");
  c->add_flag("--phasors", conn.phasors, "Input is complex analytic data (c128)");
  c->add_flag("--no-filter", conn.no_filter, "Input is already band-limited");
  c->add_option("--order", conn.order, "FIR order");
  c->add_option("--pad", conn.pad, "Reflection padding per side (default: order)");
  c->add_option("--amp-floor", conn.amp_floor, "Relative zero-amplitude guard");
  c->add_option("--window", conn.window, "Welch window length");
  c->add_option("--overlap", conn.overlap, "Welch overlap");
  c->add_option("--block-rows", conn.block_rows, "Gram product row block");
  c->add_option("--threads", conn.threads, "Worker threads (0 = PHASESYNC_THREADS / auto)");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Integrate the Roessler-driven Lorenz pair");
  s->add_option("-C,--coupling", sim.system.coupling, "Coupling C in [0, 1]");
  s->add_option("-V,--mixing", sim.system.mixing, "Linear mixing V in [0, 0.5)");
  s->add_option("-n,--samples", sim.system.n_samples, "Output samples");
  s->add_option("--burn-in", sim.system.burn_in, "Discarded samples");
  s->add_option("--seed", sim.system.seed, "Initial-condition seed");
  s->add_option("--substeps", sim.system.substeps, "RK4 steps per sample");
  s->add_option("--sample-interval", sim.system.sample_interval, "Integration time per sample");
  s->add_flag("--no-calibration-check", sim.no_calibration_check, "Skip the spectral-peak check");
  s->add_option("-o,--output", sim.output, "Output basename")->required();

  ReproduceOptions rep;
  auto* r = app.add_subcommand("reproduce", "Run a figure experiment and check it");
  r->add_option("figure", rep.figure, "fig1 | fig2 | fig3")->required();
  r->add_option("--scale", rep.scale, "fast | full");
  r->add_option("--out-dir", rep.out_dir, "Directory for CSV output");
  r->add_option("--threads", rep.threads, "Worker threads (0 = PHASESYNC_THREADS / auto)");

  BenchOptions bo;
  auto* b = app.add_subcommand("bench", "Time the three PLV implementations");
  b->add_option("--config", bo.config_path, "JSON file with BenchConfig fields");
  b->add_option("--signals", bo.signals, "Signal counts");
  b->add_option("--trials", bo.trials, "Trial counts");
  b->add_option("--samples", bo.samples, "Samples per trial");
  b->add_option("--repetitions", bo.repetitions, "Timed repetitions");
  b->add_option("--implementations", bo.implementations, "reference vectorized matrix");
  b->add_option("--reference-cap", bo.reference_cap, "Skip reference above this signal count (0 = never)");
  b->add_option("--threads", bo.threads, "Matrix implementation threads (0 = auto)");
  b->add_option("--seed", bo.seed, "Surrogate seed");
  b->add_option("-o,--output", bo.output, "CSV path");
  b->add_flag("--inject-mismatch", bo.inject_mismatch)->group("");

  std::string manifest;
  auto* rr = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
  rr->add_option("manifest", manifest, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (c->parsed()) return cmd_connectivity(conn, args, out);
    if (s->parsed()) return cmd_simulate(sim, args, out);
    if (r->parsed()) return cmd_reproduce(rep, args, out);
    if (b->parsed()) return cmd_bench(bo, args, out);
    if (rr->parsed()) return cmd_rerun(manifest, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace phasesync::cli
