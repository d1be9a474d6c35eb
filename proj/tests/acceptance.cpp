// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
#include "phasesync/bench.hpp"
#include "phasesync/chaossim.hpp"
#include "phasesync/connectivity.hpp"
#include "phasesync/reproduce.hpp"
#include "phasesync/signalprep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace phasesync;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.passed) ++failures;
  std::printf("[%s] %d. %s: %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double max_diff(const ConnectivityStack& a, const ConnectivityStack& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].values.size() != b[k].values.size()) return INFINITY;
    for (std::size_t e = 0; e < a[k].values.size(); ++e) worst = std::max(worst, std::abs(a[k].values[e] - b[k].values[e]));
  }
  return worst;
}

Array3<double> random_phases(std::size_t nc, std::size_t ns, std::size_t nt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Array3<double> a(nc, ns, nt);
  for (auto& v : a.flat()) v = u(rng);
  return a;
}

PhasorEpochs phasors_of(const Array3<double>& ph) {
  Array3<cplx> z(ph.signals(), ph.samples(), ph.trials());
  for (std::size_t k = 0; k < ph.size(); ++k) z.flat()[k] = std::polar(1.0, ph.flat()[k]);
  return PhasorEpochs::from_unit(std::move(z));
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k] / n;
    mb += b[k] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Criterion 1
Outcome implementation_equivalence() {
  std::mt19937_64 pick(20240611);
  std::uniform_int_distribution<std::size_t> signals(2, 50), samples(16, 1024), trials(1, 8);
  double worst = 0.0;
  std::ostringstream log;
  const std::size_t shapes = 32;
  for (std::size_t s = 0; s < shapes; ++s) {
    const std::size_t nc = signals(pick), ns = samples(pick), nt = trials(pick);
    const std::uint64_t seed = pick();
    const auto ph = random_phases(nc, ns, nt, seed);
    const auto z = phasors_of(ph);
    for (PlvMode mode : {PlvMode::OverSamples, PlvMode::OverTrials}) {
      const auto ref = plv_reference(ph, mode);
      worst = std::max({worst, max_diff(plv_vectorized(ph, mode), ref), max_diff(plv_matrix(z, mode), ref)});
    }
    log << "  shape " << nc << "x" << ns << "x" << nt << " seed " << seed << '\n';
  }
  std::printf("%s", log.str().c_str());
  return {worst <= 1e-9, fmt("%.0f shapes x 2 modes, max |diff| = %.3g (<= 1e-9)", double(shapes), worst)};
}

// Criterion 2
Outcome speedup() {
  bench::BenchConfig cfg;
  cfg.signal_counts = {500};
  cfg.trial_counts = {40};
  cfg.samples_per_trial = 400;
  cfg.repetitions = 5;
  cfg.reference_cap = 0;
  const auto records = bench::run_benchmark(cfg);
  std::printf("%s", bench::emit_report(records).summary.c_str());
  auto mean_of = [&](bench::Implementation impl) {
    for (const auto& r : records)
      if (r.implementation == impl) return r.mean_time();
    return static_cast<double>(NAN);
  };
  const double ref = mean_of(bench::Implementation::Reference);
  const double vec = mean_of(bench::Implementation::Vectorized);
  const double mat = mean_of(bench::Implementation::Matrix);
  const double vs_vec = vec / mat, vs_ref = ref / mat;
  return {vs_vec >= 10.0 && vs_ref >= 20.0,
          fmt("matrix %.1fx vs vectorized (>= 10), %.1fx vs reference (>= 20); vectorized %.2fx vs reference", vs_vec,
              vs_ref, ref / vec)};
}

// Criterion 3
Outcome analytic_exactness() {
  const std::size_t T = 1000;
  const auto base = random_phases(1, T, 1, 3);
  double worst = 0.0;
  auto pair = [&](double phi) {
    Array3<cplx> z(2, T, 1);
    for (std::size_t t = 0; t < T; ++t) {
      z(0, t, 0) = std::polar(1.0, base(0, t, 0) + phi);
      z(1, t, 0) = std::polar(1.0, base(0, t, 0));
    }
    return PhasorEpochs::from_unit(std::move(z));
  };
  for (double phi : {0.0, kPi / 6, kPi / 4, kPi / 3, kPi / 2, 3 * kPi / 4, 0.9 * kPi, -1.0}) {
    const auto z = pair(phi);
    worst = std::max(worst, std::abs(plv_matrix(z)[0](0, 1) - 1.0));
    worst = std::max(worst, std::abs(iplv(z)[0](0, 1) - std::abs(std::sin(phi))));
  }
  for (double phi : {kPi / 6, kPi / 4, kPi / 2, 3 * kPi / 4}) worst = std::max(worst, std::abs(ciplv(pair(phi))[0](0, 1) - 1.0));
  const double at_zero = ciplv(pair(0.0))[0](0, 1);
  return {worst <= 1e-9 && at_zero == 0.0, fmt("max error %.3g (<= 1e-9), ciPLV(phi=0) = %g", worst, at_zero)};
}

// Criterion 4
Outcome weighted_phasor_identity() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t nt = 1 + rng() % 3;
    const std::size_t L = 32 + rng() % 300;
    const std::size_t overlap = rng() % L;
    const std::size_t ns = L + rng() % 2000;
    RealEpochs x{Array3<double>(2, ns, nt), std::nullopt};
    std::normal_distribution<double> g;
    for (auto& v : x.data.flat()) v = g(rng);
    const WelchConfig cfg{L, overlap};
    const auto a = coherence_welch(x, cfg);
    const auto b = coherence_weighted_phasor(x, cfg);
    for (std::size_t f = 0; f < a.values.size(); ++f) worst = std::max(worst, std::abs(a.values[f] - b.values[f]));
  }
  return {worst <= 1e-10, fmt("20 inputs, max |diff| = %.3g (<= 1e-10)", worst)};
}

// Criterion 5
Outcome mixing_study() {
  const auto s = coupling_sweep(reproduce::mixing_sweep_config(reproduce::Scale::Fast));
  const std::size_t nc = s.couplings.size();
  if (s.mixings != std::vector<double>{0.0, 0.1, 0.2} || s.realizations != 10 || nc != 11)
    return {false, "unexpected sweep grid"};
  double a = 0.0, b = 0.0, c = INFINITY, d = INFINITY;
  for (std::size_t k = 0; k < nc; ++k) {
    a += std::abs(s.mean(Metric::PLV, 0, k) - s.mean(Metric::ciPLV, 0, k)) / nc;
    b = std::max(b, std::abs(s.mean(Metric::ciPLV, 2, k) - s.mean(Metric::ciPLV, 0, k)));
    if (s.couplings[k] <= 0.2 + 1e-12) c = std::min(c, s.mean(Metric::PLV, 1, k) - s.mean(Metric::PLV, 0, k));
    if (s.couplings[k] >= 0.8 - 1e-12) d = std::min(d, s.mean(Metric::ciPLV, 0, k) - s.mean(Metric::iPLV, 0, k));
  }
  const bool ok = a < 0.1 && b < 0.1 && c > 0.05 && d > 0.0;
  std::ostringstream msg;
  msg << "(a) mean|PLV-ciPLV| = " << a << " (< 0.1); (b) max|ciPLV(0.2)-ciPLV(0)| = " << b
      << " (< 0.1); (c) min PLV(0.1)-PLV(0), C<=0.2 = " << c << " (> 0.05); (d) min ciPLV-iPLV, C>=0.8 = " << d
      << " (> 0)";
  return {ok, msg.str()};
}

// Criterion 6
Outcome coherence_study() {
  using reproduce::Scale;
  const auto long_w = coupling_sweep(reproduce::coherence_sweep_config(Scale::Fast, {400, 200}));
  const auto short_w = coupling_sweep(reproduce::coherence_sweep_config(Scale::Fast, {100, 50}));
  const std::size_t last = long_w.couplings.size() - 1;
  if (long_w.couplings.back() != 1.0 || long_w.couplings.front() != 0.0) return {false, "unexpected coupling grid"};
  const double peak = short_w.mean(Metric::COH_MAX, 0, last);
  const double r = correlation(long_w.mean_curve(Metric::PLV, 0), long_w.mean_curve(Metric::COH_MAX, 0));
  const double bias_long = std::abs(long_w.mean(Metric::COH_MAX, 0, 0) - long_w.mean(Metric::PLV, 0, 0));
  const double bias_short = std::abs(short_w.mean(Metric::COH_MAX, 0, 0) - short_w.mean(Metric::PLV, 0, 0));
  const bool ok = std::abs(peak - 0.85) <= 0.10 && r > 0.9 && bias_short < bias_long;
  std::ostringstream msg;
  msg << "COH_MAX(100/50, C=1) = " << peak << " (0.85 +- 0.10); corr(PLV, COH_MAX) 400/200 = " << r
      << " (> 0.9); C=0 bias 100/50 = " << bias_short << " < 400/200 = " << bias_long;
  return {ok, msg.str()};
}

// Criterion 7: peak of an independently computed periodogram.
Outcome calibration() {
  double worst = 0.0;
  std::ostringstream msg;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    RosslerLorenzConfig cfg;
    cfg.seed = seed;
    cfg.check_calibration = false;
    const auto tr = integrate_coupled(cfg);
    const std::size_t n = tr.x1.size();
    double mean = 0.0;
    for (double v : tr.x1) mean += v / n;
    std::size_t best = 1;
    double best_power = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const cplx step = std::polar(1.0, -2.0 * kPi * k / n);
      cplx w = 1.0, acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        acc += (tr.x1[t] - mean) * w;
        w *= step;
        if ((t & 1023) == 1023) w = std::polar(1.0, -2.0 * kPi * double((k * (t + 1)) % n) / n);
      }
      if (std::norm(acc) > best_power) {
        best_power = std::norm(acc);
        best = k;
      }
    }
    const double peak = 2.0 * kPi * best / n;
    worst = std::max(worst, std::abs(peak - 0.585 * kPi));
    msg << "seed " << seed << ": " << peak / kPi << "pi; ";
  }
  msg << "max offset " << worst / kPi << "pi (<= 0.01pi)";
  return {worst <= 0.01 * kPi, msg.str()};
}

// Criterion 8
Outcome random_phase_floor() {
  const std::size_t T = 10000, draws = 1000;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  double lib = 0.0, oracle_gap = 0.0;
  Array3<double> ph(2, T, 1);
  for (std::size_t d = 0; d < draws; ++d) {
    for (auto& v : ph.flat()) v = u(rng);
    const double value = plv_matrix(phasors_of(ph))[0](0, 1);
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      re += std::cos(ph(0, t, 0) - ph(1, t, 0));
      im += std::sin(ph(0, t, 0) - ph(1, t, 0));
    }
    oracle_gap = std::max(oracle_gap, std::abs(value - std::hypot(re, im) / T));
    lib += value / draws;
  }
  const double expected = std::sqrt(kPi / (4.0 * T));
  return {std::abs(lib - expected) <= 0.005 && oracle_gap <= 1e-9,
          fmt("mean PLV %.5f vs sqrt(pi/4T) = %.5f (+-0.005); max gap to brute-force resultant %.2g", lib, expected,
              oracle_gap)};
}

}  // namespace

int main() {
  report(1, "implementation equivalence", implementation_equivalence);
  report(2, "speedup at 500 x 40 x 400", speedup);
  report(3, "analytic exactness", analytic_exactness);
  report(4, "weighted-phasor coherence identity", weighted_phasor_identity);
  report(5, "mixing study (fast)", mixing_study);
  report(6, "coherence window study (fast)", coherence_study);
  report(7, "spectral calibration", calibration);
  report(8, "random-phase floor", random_phase_floor);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
