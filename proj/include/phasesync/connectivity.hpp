#pragma once

#include "phasesync/signalprep.hpp"

#include <string_view>
#include <vector>

namespace phasesync {

enum class Metric { PLV, iPLV, ciPLV, COH_MAX, COH_MEAN };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);  // plv | iplv | ciplv | coh_max | coh_mean

// Observation axis of the phase-locking average.
//   OverSamples: one matrix per trial, averaging over the samples of that trial.
//   OverTrials:  one matrix per sample, averaging over trials at that sample.
enum class PlvMode { OverSamples, OverTrials };

struct ConnectivityMatrix {
  Metric metric = Metric::PLV;
  std::size_t n_signals = 0;
  std::size_t n_observations = 0;
  std::vector<double> values;  // row-major n_signals x n_signals

  double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n_signals + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * n_signals + j]; }
};

// Per-trial (OverSamples) or per-sample (OverTrials) slices; the latter is the
// time-resolved PLV.
using ConnectivityStack = std::vector<ConnectivityMatrix>;

// Mean phasor difference (1/T) * sum_t z_i(t) conj(z_j(t)) for every pair.
struct ComplexPlv {
  std::size_t n_signals = 0;
  std::size_t n_observations = 0;
  std::vector<cplx> values;         // row-major, Hermitian
  std::vector<std::size_t> counts;  // per-pair effective T; empty when nothing was masked
};

struct GramOptions {
  std::size_t block_rows = 256;  // rows of the Gram product computed per block
  std::size_t threads = 1;       // slices processed concurrently
};

// Two nested loops over signal pairs on explicit phases.
ConnectivityStack plv_reference(const Array3<double>& phases, PlvMode mode = PlvMode::OverSamples);

// All pairs at once per observation; same contract as plv_reference.
ConnectivityStack plv_vectorized(const Array3<double>& phases, PlvMode mode = PlvMode::OverSamples);

// Gram-product formulation on unit phasors. Masked (zero) phasors drop out of
// the product and the per-pair T is the number of samples unmasked in both.
std::vector<ComplexPlv> complex_plv(const PhasorEpochs& phasors, PlvMode mode = PlvMode::OverSamples,
                                    const GramOptions& options = {});

// PLV = |c|, iPLV = |Im c|, ciPLV = |Im c| / sqrt(1 - (Re c)^2), with ciPLV = 0
// once |Re c| >= 1 - 1e-12.
ConnectivityMatrix derive_metric(const ComplexPlv& c, Metric metric);

ConnectivityStack plv_matrix(const PhasorEpochs& phasors, PlvMode mode = PlvMode::OverSamples,
                             const GramOptions& options = {});
ConnectivityStack iplv(const PhasorEpochs& phasors, PlvMode mode = PlvMode::OverSamples,
                       const GramOptions& options = {});
ConnectivityStack ciplv(const PhasorEpochs& phasors, PlvMode mode = PlvMode::OverSamples,
                        const GramOptions& options = {});

inline constexpr double kCiplvSingularity = 1e-12;

// ---------------------------------------------------------------------------
// Welch coherence

struct WelchConfig {
  std::size_t window_len = 400;
  std::size_t overlap = 200;

  void validate(std::size_t n_samples) const;
  std::size_t step() const noexcept { return window_len - overlap; }
};

struct CoherenceSpectrum {
  std::vector<double> values;     // bins 0 .. window_len/2
  std::vector<double> freq_axis;  // radians/sample, 2 pi k / window_len
  std::size_t n_segments = 0;
  std::size_t window_len = 0;
  std::size_t overlap = 0;
};

// |sum X_i X_j^*| / sqrt(sum |X_i|^2 * sum |X_j|^2) over Hamming-tapered
// segments. Segments never straddle trials; their count is summed over trials.
// The two-signal overloads require x.signals() == 2.
CoherenceSpectrum coherence_welch(const RealEpochs& x, const WelchConfig& cfg);
CoherenceSpectrum coherence_welch(const RealEpochs& x, std::size_t i, std::size_t j, const WelchConfig& cfg);

// Same quantity written as an amplitude-weighted average of unit cross-phasors.
CoherenceSpectrum coherence_weighted_phasor(const RealEpochs& x, const WelchConfig& cfg);
CoherenceSpectrum coherence_weighted_phasor(const RealEpochs& x, std::size_t i, std::size_t j,
                                            const WelchConfig& cfg);

// |Im| of the normalized cross-spectrum.
CoherenceSpectrum imaginary_coherency(const RealEpochs& x, const WelchConfig& cfg);
CoherenceSpectrum imaginary_coherency(const RealEpochs& x, std::size_t i, std::size_t j, const WelchConfig& cfg);

enum class BandMode { Max, Mean };

// Bins with low <= omega_k <= high (inclusive, 1e-12 slack) are aggregated.
double band_coherence(const CoherenceSpectrum& spec, const BandSpec& band, BandMode mode);

// All-pairs band-aggregated coherence; metric is COH_MAX or COH_MEAN.
ConnectivityMatrix coherence_matrix(const RealEpochs& x, const WelchConfig& cfg, const BandSpec& band,
                                    BandMode mode);

}  // namespace phasesync
