#include "phasesync/signalprep.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phasesync {

void BandSpec::validate() const {
  if (!(low > 0.0 && low < high && high < kPi) || !std::isfinite(low) || !std::isfinite(high)) {
    std::ostringstream msg;
    msg << "band [" << low << ", " << high << "] rad/sample must satisfy 0 < low < high < pi";
    throw Error(ErrorCode::InvalidBand, msg.str());
  }
}

BandSpec BandSpec::from_hz(double low_hz, double high_hz, double fs_hz) {
  if (!(fs_hz > 0.0)) throw Error(ErrorCode::InvalidBand, "sampling rate must be positive");
  BandSpec band{2.0 * kPi * low_hz / fs_hz, 2.0 * kPi * high_hz / fs_hz};
  band.validate();
  return band;
}

void RealEpochs::validate() const {
  if (data.signals() < 1 || data.samples() < 2 || data.trials() < 1) {
    throw Error(ErrorCode::ShapeError, "epochs need >= 1 signal, >= 2 samples and >= 1 trial");
  }
  if (fs && !(*fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling rate must be positive");
  for (double v : data.flat()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "epochs contain non-finite values");
  }
}

cplx FirFilter::response(double omega) const {
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    acc += coefficients[k] * std::polar(1.0, -omega * static_cast<double>(k));
  }
  return acc;
}

PhasorEpochs PhasorEpochs::from_unit(Array3<cplx> unit) {
  PhasorEpochs out;
  out.mask = Array3<std::uint8_t>(unit.signals(), unit.samples(), unit.trials(), 0);
  out.data = std::move(unit);
  return out;
}

FirFilter design_bandpass_fir(const BandSpec& band, std::size_t order) {
  band.validate();
  if (order == 0 || order % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "filter order must be positive and even");
  }

  FirFilter f;
  f.band = band;
  f.order = order;
  f.coefficients.assign(order + 1, 0.0);

  const double recommended = 4.0 * (2.0 * kPi / band.width());
  if (static_cast<double>(order) < recommended) {
    f.undersized = true;
    std::ostringstream msg;
    msg << "OrderTooSmall: FIR order " << order << " is below the recommended " << std::ceil(recommended)
        << " for a band of width " << band.width() << " rad/sample";
    warn(msg.str());
  }

  const std::size_t half = order / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    const double m = static_cast<double>(half - k);
    double ideal = 0.0;
    if (k == half) {
      ideal = band.width() / kPi;
    } else {
      ideal = (std::sin(band.high * m) - std::sin(band.low * m)) / (kPi * m);
    }
    const double window = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(order));
    f.coefficients[k] = ideal * window;
    f.coefficients[order - k] = f.coefficients[k];
  }

  const double gain = std::abs(f.response(band.center()));
  for (double& c : f.coefficients) c /= gain;
  return f;
}

namespace {

// Causal FIR: y[n] = sum_k h[k] x[n - k] with zero initial state.
std::vector<double> fir_apply(const std::vector<double>& h, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t len = n + h.size() - 1;
  std::vector<cplx> xa(len, 0.0), ha(len, 0.0);
  std::copy(x.begin(), x.end(), xa.begin());
  std::copy(h.begin(), h.end(), ha.begin());
  auto xs = detail::fft(xa);
  auto hs = detail::fft(ha);
  for (std::size_t k = 0; k < len; ++k) xs[k] *= hs[k];
  auto y = detail::ifft(xs);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = y[k].real();
  return out;
}

std::vector<double> pad_series(const std::vector<double>& x, std::size_t pad) {
  const std::size_t n = x.size();
  std::vector<double> out(n + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(pad));
  if (pad > 0 && pad <= n - 1) {
    for (std::size_t k = 1; k <= pad; ++k) {
      out[pad - k] = x[k];
      out[pad + n - 1 + k] = x[n - 1 - k];
    }
  }
  return out;
}

std::vector<double> zero_phase(const FirFilter& f, std::vector<double> x) {
  x = fir_apply(f.coefficients, x);
  std::reverse(x.begin(), x.end());
  x = fir_apply(f.coefficients, x);
  std::reverse(x.begin(), x.end());
  return x;
}

std::vector<cplx> analytic_series(const std::vector<double>& x) {
  const std::size_t n = x.size();
  auto spec = detail::fft(std::span<const double>(x));
  // Bins 1..ceil(n/2)-1 doubled; DC (and Nyquist for even n) kept; rest zeroed.
  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) spec[k] *= 2.0;
  for (std::size_t k = (n % 2 == 0) ? n / 2 + 1 : positive_end; k < n; ++k) spec[k] = 0.0;
  auto out = detail::ifft(spec);
  for (std::size_t k = 0; k < n; ++k) out[k] = cplx(x[k], out[k].imag());
  return out;
}

void check_filterable(const RealEpochs& x, const FirFilter& f) {
  x.validate();
  if (x.samples() <= f.order + 1) {
    throw Error(ErrorCode::SignalTooShort, std::to_string(x.samples()) + " samples cannot be filtered with order " +
                                               std::to_string(f.order));
  }
}

}  // namespace

RealEpochs filter_two_pass(const RealEpochs& x, const FirFilter& f, std::size_t pad_samples) {
  check_filterable(x, f);
  RealEpochs out{Array3<double>(x.signals(), x.samples(), x.trials()), x.fs};
  for (std::size_t i = 0; i < x.signals(); ++i) {
    for (std::size_t n = 0; n < x.trials(); ++n) {
      auto y = zero_phase(f, pad_series(x.data.series(i, n), pad_samples));
      out.data.set_series(i, n, std::span<const double>(y).subspan(pad_samples, x.samples()));
    }
  }
  return out;
}

AnalyticEpochs analytic_signal(const RealEpochs& x) {
  x.validate();
  AnalyticEpochs out{Array3<cplx>(x.signals(), x.samples(), x.trials()), std::nullopt};
  for (std::size_t i = 0; i < x.signals(); ++i) {
    for (std::size_t n = 0; n < x.trials(); ++n) {
      auto a = analytic_series(x.data.series(i, n));
      out.data.set_series(i, n, a);
    }
  }
  return out;
}

AnalyticEpochs bandpass_analytic(const RealEpochs& x, const FirFilter& f, std::size_t pad_samples) {
  check_filterable(x, f);
  AnalyticEpochs out{Array3<cplx>(x.signals(), x.samples(), x.trials()), f.band};
  for (std::size_t i = 0; i < x.signals(); ++i) {
    for (std::size_t n = 0; n < x.trials(); ++n) {
      auto y = zero_phase(f, pad_series(x.data.series(i, n), pad_samples));
      auto a = analytic_series(y);
      out.data.set_series(i, n, std::span<const cplx>(a).subspan(pad_samples, x.samples()));
    }
  }
  return out;
}

PhasorEpochs normalize_phasors(const AnalyticEpochs& a, double amp_floor) {
  if (!(amp_floor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "amplitude floor must be non-negative");
  const auto& in = a.data;
  PhasorEpochs out;
  out.data = Array3<cplx>(in.signals(), in.samples(), in.trials());
  out.mask = Array3<std::uint8_t>(in.signals(), in.samples(), in.trials(), 0);

  const std::size_t ns = in.samples();
  const std::size_t nt = in.trials();
  const std::size_t per_signal = ns * nt;
  const auto src = in.flat();
  auto dst = out.data.flat();
  auto flag = out.mask.flat();

  // One signal at a time: its [samples x trials] block is contiguous.
  std::vector<double> modulus(per_signal);
  std::vector<double> scratch(ns);
  std::vector<std::size_t> masked(nt);
  for (std::size_t i = 0; i < in.signals(); ++i) {
    const std::size_t base = i * per_signal;
    for (std::size_t k = 0; k < per_signal; ++k) {
      const double sq = std::norm(src[base + k]);
      modulus[k] = std::isfinite(sq) && sq > 1e-300 ? std::sqrt(sq) : std::abs(src[base + k]);
    }
    std::fill(masked.begin(), masked.end(), 0);
    for (std::size_t n = 0; n < nt; ++n) {
      for (std::size_t t = 0; t < ns; ++t) scratch[t] = modulus[t * nt + n];
      auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(ns / 2);
      std::nth_element(scratch.begin(), mid, scratch.end());
      const double floor = amp_floor * *mid;
      for (std::size_t t = 0; t < ns; ++t) {
        const std::size_t k = t * nt + n;
        const double m = modulus[k];
        if (m == 0.0 || m < floor || !std::isfinite(m)) {
          flag[base + k] = 1;
          dst[base + k] = cplx(0.0, 0.0);
          ++masked[n];
        } else {
          dst[base + k] = src[base + k] / m;
        }
      }
    }
    for (std::size_t n = 0; n < nt; ++n) {
      if (masked[n] == ns) {
        throw Error(ErrorCode::AllSamplesMasked,
                    "signal " + std::to_string(i) + " trial " + std::to_string(n) + " is entirely below the floor");
      }
      out.masked_count += masked[n];
    }
  }
  return out;
}

InstantaneousPhase instantaneous_phase(const Array3<cplx>& a) {
  InstantaneousPhase out;
  out.phase = Array3<double>(a.signals(), a.samples(), a.trials());
  out.undefined = Array3<std::uint8_t>(a.signals(), a.samples(), a.trials(), 0);
  auto src = a.flat();
  auto dst = out.phase.flat();
  auto flag = out.undefined.flat();
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (src[k] == cplx(0.0, 0.0)) {
      dst[k] = 0.0;
      flag[k] = 1;
      ++out.undefined_count;
      continue;
    }
    double phi = std::arg(src[k]);
    if (phi <= -kPi) phi = kPi;  // -pi (negative-zero imaginary part) folds onto +pi
    dst[k] = phi;
  }
  return out;
}

InstantaneousPhase instantaneous_phase(const AnalyticEpochs& a) { return instantaneous_phase(a.data); }

RealEpochs downsample(const RealEpochs& x, std::size_t factor) {
  x.validate();
  if (factor == 0) throw Error(ErrorCode::InvalidArgument, "downsampling factor must be positive");
  const std::size_t kept = (x.samples() + factor - 1) / factor;
  if (kept < 2) {
    throw Error(ErrorCode::FactorTooLarge, "factor " + std::to_string(factor) + " leaves fewer than 2 samples");
  }
  if (factor == 1) return x;

  double total = 0.0;
  double above = 0.0;
  const double cutoff = kPi / static_cast<double>(factor);
  for (std::size_t i = 0; i < x.signals(); ++i) {
    for (std::size_t n = 0; n < x.trials(); ++n) {
      auto spec = detail::fft(std::span<const double>(x.data.series(i, n)));
      const std::size_t len = spec.size();
      for (std::size_t k = 0; k < len; ++k) {
        const double p = std::norm(spec[k]);
        const double omega = 2.0 * kPi * static_cast<double>(std::min(k, len - k)) / static_cast<double>(len);
        total += p;
        if (omega > cutoff) above += p;
      }
    }
  }
  if (total > 0.0 && above > 0.01 * total) {
    std::ostringstream msg;
    msg << "downsample by " << factor << ": " << 100.0 * above / total
        << "% of the power lies above the new Nyquist frequency";
    warn(msg.str());
  }

  RealEpochs out{Array3<double>(x.signals(), kept, x.trials()), x.fs};
  if (out.fs) *out.fs /= static_cast<double>(factor);
  for (std::size_t i = 0; i < x.signals(); ++i)
    for (std::size_t t = 0; t < kept; ++t)
      for (std::size_t n = 0; n < x.trials(); ++n) out.data(i, t, n) = x.data(i, t * factor, n);
  return out;
}

}  // namespace phasesync
