#include "phasesync/bench.hpp"

#include "phasesync/alloc_tracker.hpp"

#include "format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace phasesync::bench {

std::string_view to_string(Implementation impl) {
  switch (impl) {
    case Implementation::Reference: return "reference";
    case Implementation::Vectorized: return "vectorized";
    case Implementation::Matrix: return "matrix";
  }
  return "unknown";
}

Implementation parse_implementation(std::string_view name) {
  for (auto impl : {Implementation::Reference, Implementation::Vectorized, Implementation::Matrix}) {
    if (to_string(impl) == name) return impl;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown implementation '" + std::string(name) + "'");
}

void BenchConfig::validate() const {
  auto positive = [](const std::vector<std::size_t>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](std::size_t x) { return x > 0; });
  };
  if (!positive(signal_counts) || !positive(trial_counts) || samples_per_trial == 0 || repetitions < 1 ||
      implementations.empty()) {
    throw Error(ErrorCode::InvalidArgument, "benchmark sizes must be positive and repetitions >= 1");
  }
}

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> as_double(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

// Every implementation starts from the same analytic array.
ConnectivityStack run_once(Implementation impl, const AnalyticEpochs& input, const GramOptions& gram) {
  switch (impl) {
    case Implementation::Reference:
      return plv_reference(instantaneous_phase(input).phase);
    case Implementation::Vectorized:
      return plv_vectorized(instantaneous_phase(input).phase);
    case Implementation::Matrix:
      return plv_matrix(normalize_phasors(input), PlvMode::OverSamples, gram);
  }
  return {};
}

double max_abs_difference(const ConnectivityStack& a, const ConnectivityStack& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].values.size() != b[k].values.size()) return INFINITY;
    for (std::size_t e = 0; e < a[k].values.size(); ++e)
      worst = std::max(worst, std::abs(a[k].values[e] - b[k].values[e]));
  }
  return worst;
}

}  // namespace

double BenchRecord::mean_time() const { return mean_of(wall_time_s); }
double BenchRecord::std_time() const { return std_of(wall_time_s); }
double BenchRecord::mean_alloc() const { return mean_of(as_double(peak_alloc_bytes)); }
double BenchRecord::std_alloc() const { return std_of(as_double(peak_alloc_bytes)); }

PhasorEpochs make_surrogate(std::size_t n_signals, std::size_t n_samples, std::size_t n_trials, std::uint64_t seed) {
  if (n_signals == 0 || n_samples == 0 || n_trials == 0) {
    throw Error(ErrorCode::InvalidArgument, "surrogate dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  Array3<cplx> data(n_signals, n_samples, n_trials);
  for (auto& z : data.flat()) z = std::polar(1.0, phase(rng));
  return PhasorEpochs::from_unit(std::move(data));
}

std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  std::vector<BenchRecord> records;

  for (std::size_t n_trials : cfg.trial_counts) {
    for (std::size_t n_signals : cfg.signal_counts) {
      const AnalyticEpochs input{make_surrogate(n_signals, cfg.samples_per_trial, n_trials, cfg.seed).data, std::nullopt};

      std::vector<Implementation> active;
      for (auto impl : cfg.implementations) {
        if (impl == Implementation::Reference && cfg.reference_cap > 0 && n_signals > cfg.reference_cap) continue;
        active.push_back(impl);
      }

      // Warm-up doubles as the cross-implementation check.
      std::vector<ConnectivityStack> outputs;
      for (auto impl : active) {
        outputs.push_back(run_once(impl, input, cfg.gram));
        if (cfg.tamper) cfg.tamper(impl, outputs.back());
      }
      for (std::size_t k = 1; k < outputs.size(); ++k) {
        const double diff = max_abs_difference(outputs.front(), outputs[k]);
        if (!(diff <= 1e-9)) {
          std::ostringstream msg;
          msg << to_string(active[k]) << " differs from " << to_string(active.front()) << " by " << diff << " at "
              << n_signals << " signals x " << n_trials << " trials";
          throw Error(ErrorCode::OutputMismatch, msg.str());
        }
      }
      outputs.clear();

      for (auto impl : active) {
        BenchRecord rec;
        rec.implementation = impl;
        rec.n_signals = n_signals;
        rec.n_trials = n_trials;
        rec.n_samples = cfg.samples_per_trial;
        rec.threads = impl == Implementation::Matrix ? std::max<std::size_t>(cfg.gram.threads, 1) : 1;
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          alloc::PeakScope scope;
          const auto start = clock::now();
          auto out = run_once(impl, input, cfg.gram);
          const auto stop = clock::now();
          rec.peak_alloc_bytes.push_back(scope.transient_peak());
          rec.wall_time_s.push_back(std::chrono::duration<double>(stop - start).count());
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

double speedup(const std::vector<BenchRecord>& records, Implementation slower, Implementation faster,
               std::size_t n_signals, std::size_t n_trials) {
  const BenchRecord* s = nullptr;
  const BenchRecord* f = nullptr;
  for (const auto& r : records) {
    if (r.n_signals != n_signals || r.n_trials != n_trials) continue;
    if (r.implementation == slower) s = &r;
    if (r.implementation == faster) f = &r;
  }
  if (!s || !f || f->mean_time() <= 0.0) return 0.0;
  return s->mean_time() / f->mean_time();
}

Report emit_report(const std::vector<BenchRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no benchmark records to report");
  Report report;

  std::ostringstream csv;
  csv << "implementation,n_signals,n_trials,n_samples,rep,wall_time_s,peak_alloc_bytes\n";
  for (const auto& r : records) {
    for (std::size_t rep = 0; rep < r.wall_time_s.size(); ++rep) {
      csv << to_string(r.implementation) << ',' << r.n_signals << ',' << r.n_trials << ',' << r.n_samples << ','
          << rep << ',' << detail::fmt_double(r.wall_time_s[rep]) << ',' << r.peak_alloc_bytes[rep] << '\n';
    }
  }
  report.csv = csv.str();

  std::ostringstream sum;
  sum << std::left << std::setw(12) << "impl" << std::right << std::setw(9) << "signals" << std::setw(8) << "trials"
      << std::setw(14) << "time_s" << std::setw(12) << "+-" << std::setw(14) << "peak_MiB" << std::setw(10)
      << "threads" << std::setw(16) << "speedup_vs_ref" << '\n';
  sum << std::fixed;
  for (const auto& r : records) {
    const double ratio = speedup(records, Implementation::Reference, r.implementation, r.n_signals, r.n_trials);
    sum << std::left << std::setw(12) << to_string(r.implementation) << std::right << std::setw(9) << r.n_signals
        << std::setw(8) << r.n_trials << std::setprecision(4) << std::setw(14) << r.mean_time() << std::setw(12)
        << r.std_time() << std::setprecision(2) << std::setw(14) << r.mean_alloc() / (1024.0 * 1024.0)
        << std::setw(10) << r.threads << std::setw(16);
    if (ratio > 0.0) {
      sum << std::setprecision(2) << ratio;
    } else {
      sum << "n/a";
    }
    sum << '\n';
  }
  report.summary = sum.str();
  return report;
}

}  // namespace phasesync::bench
