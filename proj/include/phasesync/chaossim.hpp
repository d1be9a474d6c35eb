#pragma once

#include "phasesync/connectivity.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phasesync {

struct State3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const State3&, const State3&) = default;
};

// Roessler driver, time-scaled by a:
//   x' = -a (y + z),  y' = a (x + 0.2 y),  z' = a (0.2 + z (x - 5.7))
State3 rossler_derivative(const State3& s, double a);

// Lorenz response driven through y:
//   x' = 10 (y - x),  y' = 28 x - y - x z + C y1^2,  z' = x y - 8/3 z
State3 lorenz_driven_derivative(const State3& s, double y1, double coupling);

// Integration time per output sample that puts the a = 10 driver's spectral
// peak at 0.585 pi rad/sample (20 RK4 substeps).
inline constexpr double kCalibratedSampleInterval = 0.1713;
inline constexpr double kTargetPeak = 0.585 * kPi;
inline constexpr double kPeakTolerance = 0.01 * kPi;

// Default band of the coupling experiments.
inline constexpr BandSpec kRosslerBand{0.570 * kPi, 0.600 * kPi};

struct RosslerLorenzConfig {
  double a = 10.0;
  double coupling = 0.0;  // C in [0, 1]
  double mixing = 0.0;    // V in [0, 0.5)
  std::size_t n_samples = 20000;
  std::size_t burn_in = 5000;
  double sample_interval = kCalibratedSampleInterval;
  std::size_t substeps = 20;
  std::uint64_t seed = 1;
  bool check_calibration = true;  // verify the x1 peak against kTargetPeak

  void validate() const;
  std::string describe() const;
};

struct Trajectory {
  std::vector<double> x1, y1, z1, x2, y2, z2;
  std::size_t size() const noexcept { return x1.size(); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Fixed-step RK4 of the 6-D system (the driver never sees the response).
// Initial state: driver x, y ~ U[-5, 5], z ~ U[0, 1]; response
// x, y ~ U[-10, 10], z ~ U[10, 30]. Throws Divergence on a non-finite state and
// CalibrationFailure when the x1 peak misses 0.585 pi by more than 0.01 pi.
Trajectory integrate_coupled(const RosslerLorenzConfig& cfg);

// Frequency (rad/sample) of the largest periodogram bin, DC excluded.
double spectral_peak(std::span<const double> x);

// x~ = x + V y, y~ = y + V x.
std::pair<std::vector<double>, std::vector<double>> linear_mix(std::span<const double> x, std::span<const double> y,
                                                               double mixing);
// Exact inverse of linear_mix.
std::pair<std::vector<double>, std::vector<double>> linear_unmix(std::span<const double> x,
                                                                 std::span<const double> y, double mixing);

// Seed of realization r, shared across every coupling and mixing value.
std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t realization);

struct SweepConfig {
  std::vector<double> couplings;
  std::vector<double> mixings{0.0};
  std::size_t realizations = 10;
  BandSpec band = kRosslerBand;
  WelchConfig welch{400, 200};
  std::uint64_t base_seed = 1;
  std::size_t filter_order = 2000;
  std::size_t pad_samples = 2000;
  RosslerLorenzConfig system;  // coupling, mixing and seed are overridden per cell
  std::size_t threads = 1;

  void validate() const;
};

inline constexpr Metric kSweepMetrics[] = {Metric::PLV, Metric::iPLV, Metric::ciPLV, Metric::COH_MAX,
                                           Metric::COH_MEAN};

struct SweepResult {
  std::vector<double> couplings;
  std::vector<double> mixings;
  std::vector<Metric> metrics;
  std::size_t realizations = 0;
  BandSpec band;
  WelchConfig welch;
  std::vector<double> values;  // [metric][mixing][coupling][realization]

  std::size_t offset(std::size_t m, std::size_t v, std::size_t c, std::size_t r) const noexcept {
    return ((m * mixings.size() + v) * couplings.size() + c) * realizations + r;
  }
  double value(Metric m, std::size_t v, std::size_t c, std::size_t r) const;
  double mean(Metric m, std::size_t v, std::size_t c) const;
  double stddev(Metric m, std::size_t v, std::size_t c) const;  // sample std (n - 1)
  std::vector<double> mean_curve(Metric m, std::size_t v) const;

  // Long format: metric,C,V,realization,value
  std::string to_csv() const;
};

// For each (C, realization): integrate once, then for each V mix, band-pass
// (zero-phase FIR, analytic signal before trimming), normalize and compute
// PLV/iPLV/ciPLV; coherence is taken from the raw mixed pair.
SweepResult coupling_sweep(const SweepConfig& cfg);

}  // namespace phasesync
