#pragma once

#include "phasesync/array3.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace phasesync {

inline constexpr double kPi = 3.14159265358979323846;

// Frequency band in angular units (radians per sample), 0 < low < high < pi.
struct BandSpec {
  double low = 0.0;
  double high = 0.0;

  void validate() const;
  double center() const noexcept { return 0.5 * (low + high); }
  double width() const noexcept { return high - low; }

  static BandSpec from_hz(double low_hz, double high_hz, double fs_hz);
  friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

struct RealEpochs {
  Array3<double> data;
  std::optional<double> fs;  // Hz; empty means normalized frequency units

  std::size_t signals() const noexcept { return data.signals(); }
  std::size_t samples() const noexcept { return data.samples(); }
  std::size_t trials() const noexcept { return data.trials(); }

  // Throws ShapeError / InvalidArgument when the epoch invariants fail.
  void validate() const;
};

struct FirFilter {
  std::vector<double> coefficients;  // length order + 1, symmetric
  BandSpec band;
  std::size_t order = 0;
  bool undersized = false;  // order below the recommended transition-width floor

  // Complex frequency response at angular frequency omega.
  cplx response(double omega) const;
};

struct AnalyticEpochs {
  Array3<cplx> data;
  std::optional<BandSpec> band;
};

struct PhasorEpochs {
  Array3<cplx> data;
  Array3<std::uint8_t> mask;  // 1 where the amplitude fell below the guard
  std::size_t masked_count = 0;

  std::size_t signals() const noexcept { return data.signals(); }
  std::size_t samples() const noexcept { return data.samples(); }
  std::size_t trials() const noexcept { return data.trials(); }

  // Wraps already unit-modulus values with an empty mask.
  static PhasorEpochs from_unit(Array3<cplx> unit);
};

struct InstantaneousPhase {
  Array3<double> phase;             // radians in (-pi, pi]
  Array3<std::uint8_t> undefined;   // 1 where the sample was exactly zero
  std::size_t undefined_count = 0;
};

// Hamming-windowed sinc band-pass, normalized to unit gain at the band center.
// `order` must be even. Emits a warning and sets `undersized` when the order is
// below 4 * 2pi / (high - low).
FirFilter design_bandpass_fir(const BandSpec& band, std::size_t order);

// Zero-phase filtering: forward pass, reverse, second pass, reverse. Each
// series is extended by `pad_samples` of mirror reflection on both sides (zeros
// when the series is too short to reflect) and trimmed afterwards.
RealEpochs filter_two_pass(const RealEpochs& x, const FirFilter& f, std::size_t pad_samples);

// x + i*H{x} computed in the frequency domain. Real part equals x exactly.
AnalyticEpochs analytic_signal(const RealEpochs& x);

// Pads, filters twice, builds the analytic signal on the padded series and only
// then trims the padding away.
AnalyticEpochs bandpass_analytic(const RealEpochs& x, const FirFilter& f, std::size_t pad_samples);

inline constexpr double kDefaultAmplitudeFloor = 1e-6;

// Divides each sample by its modulus. Samples whose modulus is below
// amp_floor * median modulus of their (signal, trial) series become 0 + 0i and
// are flagged in the mask. Throws AllSamplesMasked if a whole series is masked.
PhasorEpochs normalize_phasors(const AnalyticEpochs& a, double amp_floor = kDefaultAmplitudeFloor);

InstantaneousPhase instantaneous_phase(const AnalyticEpochs& a);
InstantaneousPhase instantaneous_phase(const Array3<cplx>& a);

// Keeps every factor-th sample. Warns when more than 1% of the power sits above
// pi / factor.
RealEpochs downsample(const RealEpochs& x, std::size_t factor);

}  // namespace phasesync
