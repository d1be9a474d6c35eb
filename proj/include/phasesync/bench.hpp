#pragma once

#include "phasesync/connectivity.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace phasesync::bench {

enum class Implementation { Reference, Vectorized, Matrix };

std::string_view to_string(Implementation impl);
Implementation parse_implementation(std::string_view name);  // reference | vectorized | matrix

struct BenchConfig {
  std::vector<std::size_t> signal_counts{500, 1000, 1500, 2000, 2459};
  std::vector<std::size_t> trial_counts{20, 40};
  std::size_t samples_per_trial = 400;
  std::size_t repetitions = 5;
  std::vector<Implementation> implementations{Implementation::Reference, Implementation::Vectorized,
                                              Implementation::Matrix};
  std::size_t reference_cap = 1000;  // reference skipped above this many signals; 0 = no cap
  std::uint64_t seed = 1;
  GramOptions gram;  // gram.threads is reported in every record

  // Test hook: lets a test corrupt one implementation's output before the
  // cross-implementation check.
  std::function<void(Implementation, ConnectivityStack&)> tamper;

  void validate() const;
};

struct BenchRecord {
  Implementation implementation = Implementation::Matrix;
  std::size_t n_signals = 0;
  std::size_t n_trials = 0;
  std::size_t n_samples = 0;
  std::size_t threads = 1;
  std::vector<double> wall_time_s;           // one per repetition
  std::vector<std::size_t> peak_alloc_bytes;  // one per repetition

  double mean_time() const;
  double std_time() const;
  double mean_alloc() const;
  double std_alloc() const;
};

// Seeded uniform phases on the unit circle.
PhasorEpochs make_surrogate(std::size_t n_signals, std::size_t n_samples, std::size_t n_trials, std::uint64_t seed);

// Times every (implementation, shape) after one untimed warm-up whose outputs
// are cross-checked (1e-9); throws OutputMismatch if they disagree. Surrogate
// generation happens outside the timed window.
std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg);

struct Report {
  std::string csv;      // implementation,n_signals,n_trials,n_samples,rep,wall_time_s,peak_alloc_bytes
  std::string summary;  // human-readable table with speedups
};

Report emit_report(const std::vector<BenchRecord>& records);

// Mean-time ratio slower / faster for a given shape, or 0 when either is missing.
double speedup(const std::vector<BenchRecord>& records, Implementation slower, Implementation faster,
               std::size_t n_signals, std::size_t n_trials);

}  // namespace phasesync::bench
