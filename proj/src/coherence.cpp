#include "phasesync/connectivity.hpp"

#include "fft.hpp"
#include "slices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phasesync {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::PLV: return "plv";
    case Metric::iPLV: return "iplv";
    case Metric::ciPLV: return "ciplv";
    case Metric::COH_MAX: return "coh_max";
    case Metric::COH_MEAN: return "coh_mean";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : {Metric::PLV, Metric::iPLV, Metric::ciPLV, Metric::COH_MAX, Metric::COH_MEAN}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

void WelchConfig::validate(std::size_t n_samples) const {
  if (window_len < 2 || overlap >= window_len) {
    throw Error(ErrorCode::InvalidArgument, "Welch config needs window_len >= 2 and 0 <= overlap < window_len");
  }
  if (window_len > n_samples) {
    throw Error(ErrorCode::WindowTooLong, "window of " + std::to_string(window_len) + " samples exceeds the " +
                                              std::to_string(n_samples) + "-sample trials");
  }
}

namespace {

// Tapered segment spectra of one signal, bins 0..L/2, segment-major.
struct SegmentSpectra {
  std::size_t segments = 0;
  std::size_t bins = 0;
  std::vector<cplx> values;
};

std::vector<double> hamming(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t k = 0; k < len; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(len - 1));
  }
  return w;
}

SegmentSpectra segment_spectra(const RealEpochs& x, std::size_t signal, const WelchConfig& cfg,
                               const std::vector<double>& window) {
  SegmentSpectra s;
  s.bins = cfg.window_len / 2 + 1;
  const std::size_t per_trial = (x.samples() - cfg.window_len) / cfg.step() + 1;
  s.segments = per_trial * x.trials();
  s.values.reserve(s.segments * s.bins);

  std::vector<double> seg(cfg.window_len);
  for (std::size_t n = 0; n < x.trials(); ++n) {
    for (std::size_t q = 0; q < per_trial; ++q) {
      const std::size_t start = q * cfg.step();
      for (std::size_t k = 0; k < cfg.window_len; ++k) seg[k] = window[k] * x.data(signal, start + k, n);
      auto spec = detail::fft(std::span<const double>(seg));
      s.values.insert(s.values.end(), spec.begin(), spec.begin() + static_cast<std::ptrdiff_t>(s.bins));
    }
  }
  return s;
}

struct CrossSums {
  std::vector<cplx> cross;  // sum X_i X_j^*
  std::vector<double> power_i;
  std::vector<double> power_j;
};

CrossSums cross_sums(const SegmentSpectra& a, const SegmentSpectra& b) {
  CrossSums s{std::vector<cplx>(a.bins), std::vector<double>(a.bins), std::vector<double>(a.bins)};
  for (std::size_t q = 0; q < a.segments; ++q) {
    for (std::size_t f = 0; f < a.bins; ++f) {
      const cplx xi = a.values[q * a.bins + f];
      const cplx xj = b.values[q * b.bins + f];
      s.cross[f] += xi * std::conj(xj);
      s.power_i[f] += std::norm(xi);
      s.power_j[f] += std::norm(xj);
    }
  }
  return s;
}

CoherenceSpectrum blank_spectrum(const WelchConfig& cfg, std::size_t segments) {
  CoherenceSpectrum spec;
  const std::size_t bins = cfg.window_len / 2 + 1;
  spec.values.assign(bins, 0.0);
  spec.freq_axis.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    spec.freq_axis[k] = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(cfg.window_len);
  }
  spec.n_segments = segments;
  spec.window_len = cfg.window_len;
  spec.overlap = cfg.overlap;
  return spec;
}

void check_pair(const RealEpochs& x, std::size_t i, std::size_t j, const WelchConfig& cfg) {
  x.validate();
  if (i >= x.signals() || j >= x.signals()) throw Error(ErrorCode::ShapeError, "signal index out of range");
  cfg.validate(x.samples());
}

void check_two(const RealEpochs& x) {
  if (x.signals() != 2) {
    throw Error(ErrorCode::ShapeError, "expected exactly 2 signals, got " + std::to_string(x.signals()));
  }
}

enum class Part { Magnitude, Imaginary };

CoherenceSpectrum normalized_cross(const RealEpochs& x, std::size_t i, std::size_t j, const WelchConfig& cfg,
                                   Part part) {
  check_pair(x, i, j, cfg);
  const auto window = hamming(cfg.window_len);
  const auto a = segment_spectra(x, i, cfg, window);
  const auto b = segment_spectra(x, j, cfg, window);
  const auto sums = cross_sums(a, b);
  auto spec = blank_spectrum(cfg, a.segments);
  for (std::size_t f = 0; f < a.bins; ++f) {
    const double den = std::sqrt(sums.power_i[f] * sums.power_j[f]);
    if (den <= 0.0) continue;
    spec.values[f] = (part == Part::Magnitude ? std::abs(sums.cross[f]) : std::abs(sums.cross[f].imag())) / den;
  }
  return spec;
}

}  // namespace

CoherenceSpectrum coherence_welch(const RealEpochs& x, std::size_t i, std::size_t j, const WelchConfig& cfg) {
  return normalized_cross(x, i, j, cfg, Part::Magnitude);
}

CoherenceSpectrum coherence_welch(const RealEpochs& x, const WelchConfig& cfg) {
  check_two(x);
  return coherence_welch(x, 0, 1, cfg);
}

CoherenceSpectrum imaginary_coherency(const RealEpochs& x, std::size_t i, std::size_t j, const WelchConfig& cfg) {
  return normalized_cross(x, i, j, cfg, Part::Imaginary);
}

CoherenceSpectrum imaginary_coherency(const RealEpochs& x, const WelchConfig& cfg) {
  check_two(x);
  return imaginary_coherency(x, 0, 1, cfg);
}

CoherenceSpectrum coherence_weighted_phasor(const RealEpochs& x, std::size_t i, std::size_t j,
                                            const WelchConfig& cfg) {
  check_pair(x, i, j, cfg);
  const auto window = hamming(cfg.window_len);
  const auto a = segment_spectra(x, i, cfg, window);
  const auto b = segment_spectra(x, j, cfg, window);
  auto spec = blank_spectrum(cfg, a.segments);

  for (std::size_t f = 0; f < a.bins; ++f) {
    cplx weighted{0.0, 0.0};
    double power_i = 0.0;
    double power_j = 0.0;
    for (std::size_t q = 0; q < a.segments; ++q) {
      const cplx xi = a.values[q * a.bins + f];
      const cplx xj = b.values[q * b.bins + f];
      const double amp_i = std::abs(xi);
      const double amp_j = std::abs(xj);
      power_i += amp_i * amp_i;
      power_j += amp_j * amp_j;
      const double weight = amp_i * amp_j;
      if (weight > 0.0) weighted += weight * (xi * std::conj(xj) / weight);  // weight times unit cross-phasor
    }
    const double den = std::sqrt(power_i * power_j);
    if (den > 0.0) spec.values[f] = std::abs(weighted) / den;
  }
  return spec;
}

CoherenceSpectrum coherence_weighted_phasor(const RealEpochs& x, const WelchConfig& cfg) {
  check_two(x);
  return coherence_weighted_phasor(x, 0, 1, cfg);
}

double band_coherence(const CoherenceSpectrum& spec, const BandSpec& band, BandMode mode) {
  constexpr double slack = 1e-12;
  double best = 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const double w = spec.freq_axis[k];
    if (w < band.low - slack || w > band.high + slack) continue;
    best = count == 0 ? spec.values[k] : std::max(best, spec.values[k]);
    sum += spec.values[k];
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::EmptyBand, "no frequency bin of a " + std::to_string(spec.window_len) +
                                          "-sample window falls inside the band");
  }
  return mode == BandMode::Max ? best : sum / static_cast<double>(count);
}

ConnectivityMatrix coherence_matrix(const RealEpochs& x, const WelchConfig& cfg, const BandSpec& band,
                                    BandMode mode) {
  x.validate();
  cfg.validate(x.samples());
  band.validate();
  const auto window = hamming(cfg.window_len);
  std::vector<SegmentSpectra> spectra;
  spectra.reserve(x.signals());
  for (std::size_t i = 0; i < x.signals(); ++i) spectra.push_back(segment_spectra(x, i, cfg, window));

  const std::size_t nc = x.signals();
  auto m = detail::blank_matrix(mode == BandMode::Max ? Metric::COH_MAX : Metric::COH_MEAN, nc,
                                spectra.front().segments);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = i; j < nc; ++j) {
      const auto sums = cross_sums(spectra[i], spectra[j]);
      auto spec = blank_spectrum(cfg, spectra[i].segments);
      for (std::size_t f = 0; f < spec.values.size(); ++f) {
        const double den = std::sqrt(sums.power_i[f] * sums.power_j[f]);
        if (den > 0.0) spec.values[f] = std::abs(sums.cross[f]) / den;
      }
      const double v = band_coherence(spec, band, mode);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

}  // namespace phasesync
