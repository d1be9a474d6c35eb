#include "phasesync/chaossim.hpp"
#include "phasesync/parallel.hpp"

#include "fft.hpp"
#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace phasesync {

State3 rossler_derivative(const State3& s, double a) {
  return {-a * (s.y + s.z), a * (s.x + 0.2 * s.y), a * (0.2 + s.z * (s.x - 5.7))};
}

State3 lorenz_driven_derivative(const State3& s, double y1, double coupling) {
  return {10.0 * (s.y - s.x), 28.0 * s.x - s.y - s.x * s.z + coupling * y1 * y1, s.x * s.y - (8.0 / 3.0) * s.z};
}

void RosslerLorenzConfig::validate() const {
  if (!(coupling >= 0.0 && coupling <= 1.0)) throw Error(ErrorCode::InvalidArgument, "coupling C must lie in [0, 1]");
  if (!(mixing >= 0.0 && mixing < 0.5)) throw Error(ErrorCode::InvalidArgument, "mixing V must lie in [0, 0.5)");
  if (!(a > 0.0) || !(sample_interval > 0.0) || substeps < 1 || n_samples < 2) {
    throw Error(ErrorCode::InvalidArgument, "need a > 0, sample_interval > 0, substeps >= 1, n_samples >= 2");
  }
}

std::string RosslerLorenzConfig::describe() const {
  std::ostringstream s;
  s << "a=" << a << " C=" << coupling << " V=" << mixing << " n_samples=" << n_samples << " burn_in=" << burn_in
    << " sample_interval=" << sample_interval << " substeps=" << substeps << " seed=" << seed;
  return s.str();
}

namespace {

struct State6 {
  State3 driver;
  State3 response;
};

State6 derivative(const State6& s, double a, double coupling) {
  return {rossler_derivative(s.driver, a), lorenz_driven_derivative(s.response, s.driver.y, coupling)};
}

State3 axpy(const State3& base, double h, const State3& d) {
  return {base.x + h * d.x, base.y + h * d.y, base.z + h * d.z};
}

State6 axpy(const State6& base, double h, const State6& d) {
  return {axpy(base.driver, h, d.driver), axpy(base.response, h, d.response)};
}

State3 rk4_combine(const State3& s, double h, const State3& k1, const State3& k2, const State3& k3, const State3& k4) {
  return {s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          s.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z)};
}

State6 rk4_step(const State6& s, double h, double a, double coupling) {
  const State6 k1 = derivative(s, a, coupling);
  const State6 k2 = derivative(axpy(s, 0.5 * h, k1), a, coupling);
  const State6 k3 = derivative(axpy(s, 0.5 * h, k2), a, coupling);
  const State6 k4 = derivative(axpy(s, h, k3), a, coupling);
  return {rk4_combine(s.driver, h, k1.driver, k2.driver, k3.driver, k4.driver),
          rk4_combine(s.response, h, k1.response, k2.response, k3.response, k4.response)};
}

bool finite(const State6& s) {
  return std::isfinite(s.driver.x) && std::isfinite(s.driver.y) && std::isfinite(s.driver.z) &&
         std::isfinite(s.response.x) && std::isfinite(s.response.y) && std::isfinite(s.response.z);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t realization) {
  return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(realization) + 1));
}

Trajectory integrate_coupled(const RosslerLorenzConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  State6 s;
  s.driver = {uniform(-5.0, 5.0), uniform(-5.0, 5.0), uniform(0.0, 1.0)};
  s.response = {uniform(-10.0, 10.0), uniform(-10.0, 10.0), uniform(10.0, 30.0)};

  Trajectory tr;
  for (auto* v : {&tr.x1, &tr.y1, &tr.z1, &tr.x2, &tr.y2, &tr.z2}) v->resize(cfg.n_samples);

  const double h = cfg.sample_interval / static_cast<double>(cfg.substeps);
  const std::size_t total = cfg.burn_in + cfg.n_samples;
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t j = 0; j < cfg.substeps; ++j) s = rk4_step(s, h, cfg.a, cfg.coupling);
    if (!finite(s)) {
      throw Error(ErrorCode::Divergence, "non-finite state at output sample " + std::to_string(k) + " (" +
                                             cfg.describe() + ")");
    }
    if (k < cfg.burn_in) continue;
    const std::size_t t = k - cfg.burn_in;
    tr.x1[t] = s.driver.x;
    tr.y1[t] = s.driver.y;
    tr.z1[t] = s.driver.z;
    tr.x2[t] = s.response.x;
    tr.y2[t] = s.response.y;
    tr.z2[t] = s.response.z;
  }

  if (cfg.check_calibration) {
    const double peak = spectral_peak(tr.x1);
    if (std::abs(peak - kTargetPeak) > kPeakTolerance) {
      std::ostringstream msg;
      msg << "x1 spectral peak at " << peak / kPi << " pi rad/sample, expected 0.585 pi +- 0.01 pi ("
          << cfg.describe() << ")";
      throw Error(ErrorCode::CalibrationFailure, msg.str());
    }
  }
  return tr;
}

double spectral_peak(std::span<const double> x) {
  if (x.size() < 4) throw Error(ErrorCode::ShapeError, "spectral_peak needs at least 4 samples");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> centered(x.begin(), x.end());
  for (double& v : centered) v -= mean;
  const auto spec = detail::fft(std::span<const double>(centered));
  std::size_t best = 1;
  for (std::size_t k = 2; k <= spec.size() / 2; ++k) {
    if (std::norm(spec[k]) > std::norm(spec[best])) best = k;
  }
  return 2.0 * kPi * static_cast<double>(best) / static_cast<double>(spec.size());
}

std::pair<std::vector<double>, std::vector<double>> linear_mix(std::span<const double> x, std::span<const double> y,
                                                               double mixing) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeError, "linear_mix needs equal-length inputs");
  if (!(mixing >= 0.0 && mixing < 0.5)) throw Error(ErrorCode::InvalidArgument, "mixing V must lie in [0, 0.5)");
  std::vector<double> mx(x.size()), my(y.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx[t] = x[t] + mixing * y[t];
    my[t] = y[t] + mixing * x[t];
  }
  return {std::move(mx), std::move(my)};
}

std::pair<std::vector<double>, std::vector<double>> linear_unmix(std::span<const double> x,
                                                                 std::span<const double> y, double mixing) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeError, "linear_unmix needs equal-length inputs");
  if (!(mixing >= 0.0 && mixing < 0.5)) throw Error(ErrorCode::InvalidArgument, "mixing V must lie in [0, 0.5)");
  const double det = 1.0 - mixing * mixing;
  std::vector<double> ux(x.size()), uy(y.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    ux[t] = (x[t] - mixing * y[t]) / det;
    uy[t] = (y[t] - mixing * x[t]) / det;
  }
  return {std::move(ux), std::move(uy)};
}

// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
  if (couplings.empty() || mixings.empty()) throw Error(ErrorCode::InvalidArgument, "sweep grids must be non-empty");
  if (realizations < 1) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one realization");
  for (double c : couplings)
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidArgument, "coupling grid values must lie in [0, 1]");
  for (double v : mixings)
    if (!(v >= 0.0 && v < 0.5)) throw Error(ErrorCode::InvalidArgument, "mixing grid values must lie in [0, 0.5)");
  band.validate();
  welch.validate(system.n_samples);
}

namespace {

std::size_t metric_index(const SweepResult& r, Metric m) {
  auto it = std::find(r.metrics.begin(), r.metrics.end(), m);
  if (it == r.metrics.end()) throw Error(ErrorCode::InvalidArgument, "metric not present in sweep result");
  return static_cast<std::size_t>(it - r.metrics.begin());
}

}  // namespace

double SweepResult::value(Metric m, std::size_t v, std::size_t c, std::size_t r) const {
  return values[offset(metric_index(*this, m), v, c, r)];
}

double SweepResult::mean(Metric m, std::size_t v, std::size_t c) const {
  const std::size_t base = offset(metric_index(*this, m), v, c, 0);
  double sum = 0.0;
  for (std::size_t r = 0; r < realizations; ++r) sum += values[base + r];
  return sum / static_cast<double>(realizations);
}

double SweepResult::stddev(Metric m, std::size_t v, std::size_t c) const {
  if (realizations < 2) return 0.0;
  const std::size_t base = offset(metric_index(*this, m), v, c, 0);
  const double mu = mean(m, v, c);
  double ss = 0.0;
  for (std::size_t r = 0; r < realizations; ++r) ss += (values[base + r] - mu) * (values[base + r] - mu);
  return std::sqrt(ss / static_cast<double>(realizations - 1));
}

std::vector<double> SweepResult::mean_curve(Metric m, std::size_t v) const {
  std::vector<double> curve(couplings.size());
  for (std::size_t c = 0; c < couplings.size(); ++c) curve[c] = mean(m, v, c);
  return curve;
}

std::string SweepResult::to_csv() const {
  std::ostringstream out;
  out << "metric,C,V,realization,value\n";
  for (std::size_t m = 0; m < metrics.size(); ++m)
    for (std::size_t v = 0; v < mixings.size(); ++v)
      for (std::size_t c = 0; c < couplings.size(); ++c)
        for (std::size_t r = 0; r < realizations; ++r)
          out << to_string(metrics[m]) << ',' << detail::fmt_double(couplings[c]) << ','
              << detail::fmt_double(mixings[v]) << ',' << r << ',' << detail::fmt_double(values[offset(m, v, c, r)])
              << '\n';
  return out.str();
}

SweepResult coupling_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.couplings = cfg.couplings;
  result.mixings = cfg.mixings;
  result.metrics.assign(std::begin(kSweepMetrics), std::end(kSweepMetrics));
  result.realizations = cfg.realizations;
  result.band = cfg.band;
  result.welch = cfg.welch;
  result.values.assign(result.metrics.size() * cfg.mixings.size() * cfg.couplings.size() * cfg.realizations, 0.0);

  const FirFilter filter = design_bandpass_fir(cfg.band, cfg.filter_order);
  const std::size_t jobs = cfg.couplings.size() * cfg.realizations;

  parallel_for(jobs, cfg.threads, [&](std::size_t job) {
    const std::size_t c = job / cfg.realizations;
    const std::size_t r = job % cfg.realizations;
    std::size_t v = 0;
    try {
      RosslerLorenzConfig sys = cfg.system;
      sys.coupling = cfg.couplings[c];
      sys.mixing = 0.0;
      sys.seed = realization_seed(cfg.base_seed, r);
      const Trajectory tr = integrate_coupled(sys);

      for (v = 0; v < cfg.mixings.size(); ++v) {
        auto [mx, my] = linear_mix(tr.x1, tr.x2, cfg.mixings[v]);
        RealEpochs pair{Array3<double>(2, mx.size(), 1), std::nullopt};
        pair.data.set_series(0, 0, mx);
        pair.data.set_series(1, 0, my);

        const auto phasors = normalize_phasors(bandpass_analytic(pair, filter, cfg.pad_samples));
        const ComplexPlv cp = complex_plv(phasors).front();
        const auto coh = coherence_welch(pair, cfg.welch);

        const double metrics[] = {derive_metric(cp, Metric::PLV)(0, 1), derive_metric(cp, Metric::iPLV)(0, 1),
                                  derive_metric(cp, Metric::ciPLV)(0, 1), band_coherence(coh, cfg.band, BandMode::Max),
                                  band_coherence(coh, cfg.band, BandMode::Mean)};
        for (std::size_t m = 0; m < std::size(metrics); ++m) result.values[result.offset(m, v, c, r)] = metrics[m];
      }
    } catch (const Error& e) {
      std::ostringstream ctx;
      ctx << e.detail() << " [cell C=" << cfg.couplings[c] << " V=" << (v < cfg.mixings.size() ? cfg.mixings[v] : 0.0)
          << " realization=" << r << "]";
      throw Error(e.code(), ctx.str());
    }
  });
  return result;
}

}  // namespace phasesync
