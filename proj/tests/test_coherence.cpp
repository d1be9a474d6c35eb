#include "phasesync/connectivity.hpp"
#include "phasesync/signalprep.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace phasesync;
using testutil::error_code_of;

namespace {

RealEpochs pair_epochs(const std::vector<double>& a, const std::vector<double>& b, std::size_t trials = 1) {
  const std::size_t ns = a.size() / trials;
  RealEpochs x{Array3<double>(2, ns, trials), std::nullopt};
  for (std::size_t n = 0; n < trials; ++n)
    for (std::size_t t = 0; t < ns; ++t) {
      x.data(0, t, n) = a[n * ns + t];
      x.data(1, t, n) = b[n * ns + t];
    }
  return x;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Textbook Welch coherence magnitude: symmetric Hamming taper, no detrending,
// naive DFT per segment, segments restarted in every trial.
std::vector<double> welch_oracle(const RealEpochs& x, std::size_t L, std::size_t overlap) {
  std::vector<double> w(L);
  for (std::size_t k = 0; k < L; ++k) w[k] = 0.54 - 0.46 * std::cos(2.0 * kPi * k / (L - 1));
  const std::size_t bins = L / 2 + 1;
  std::vector<cplx> sxy(bins);
  std::vector<double> sxx(bins), syy(bins);
  for (std::size_t n = 0; n < x.trials(); ++n) {
    for (std::size_t s = 0; s + L <= x.samples(); s += L - overlap) {
      std::vector<cplx> a(L), b(L);
      for (std::size_t k = 0; k < L; ++k) {
        a[k] = w[k] * x.data(0, s + k, n);
        b[k] = w[k] * x.data(1, s + k, n);
      }
      const auto A = testutil::naive_dft(a), B = testutil::naive_dft(b);
      for (std::size_t f = 0; f < bins; ++f) {
        sxy[f] += A[f] * std::conj(B[f]);
        sxx[f] += std::norm(A[f]);
        syy[f] += std::norm(B[f]);
      }
    }
  }
  std::vector<double> out(bins);
  for (std::size_t f = 0; f < bins; ++f) out[f] = std::abs(sxy[f]) / std::sqrt(sxx[f] * syy[f]);
  return out;
}

std::size_t tone_bin(const CoherenceSpectrum& s, double w) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < s.freq_axis.size(); ++k)
    if (std::abs(s.freq_axis[k] - w) < std::abs(s.freq_axis[best] - w)) best = k;
  return best;
}

}  // namespace

TEST_CASE("WelchConfig validation") {
  CHECK_NOTHROW(WelchConfig{400, 200}.validate(400));
  CHECK((error_code_of([] { WelchConfig{400, 200}.validate(399); }) == ErrorCode::WindowTooLong));
  CHECK((error_code_of([] { WelchConfig{100, 100}.validate(1000); }) == ErrorCode::InvalidArgument));
  CHECK(WelchConfig{100, 50}.step() == 50);
  const auto x = pair_epochs(noise(300, 1), noise(300, 2));
  CHECK((error_code_of([&] { coherence_welch(x, {400, 200}); }) == ErrorCode::WindowTooLong));
}

TEST_CASE("Welch coherence against a direct construction") {
  const auto a = noise(3 * 700, 3);
  auto b = noise(3 * 700, 4);
  for (std::size_t t = 1; t < b.size(); ++t) b[t] += 0.8 * a[t - 1];
  const auto x = pair_epochs(a, b, 3);
  for (auto [L, ov] : {std::pair<std::size_t, std::size_t>{100, 50}, {64, 0}, {128, 100}}) {
    const auto s = coherence_welch(x, {L, ov});
    const auto oracle = welch_oracle(x, L, ov);
    REQUIRE(s.values.size() == L / 2 + 1);
    CHECK(s.n_segments == 3 * ((700 - L) / (L - ov) + 1));
    CHECK(s.window_len == L);
    CHECK(s.overlap == ov);
    for (std::size_t f = 0; f < oracle.size(); ++f) {
      CHECK(s.values[f] == doctest::Approx(oracle[f]).epsilon(1e-9));
      CHECK(s.freq_axis[f] == doctest::Approx(2.0 * kPi * f / L));
      CHECK(s.values[f] >= 0.0);
      CHECK(s.values[f] <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("Welch coherence of identical signals") {
  const auto a = noise(1000, 5);
  const auto s = coherence_welch(pair_epochs(a, a), {100, 50});
  for (double v : s.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  const auto ic = imaginary_coherency(pair_epochs(a, a), {100, 50});
  for (double v : ic.values) CHECK(v <= 1e-12);
}

TEST_CASE("tone with a constant phase offset and weak noise") {
  const std::size_t n = 200 * 51;
  const double w = 2.0 * kPi * 20.0 / 200.0;  // on a bin of the 200-sample window
  std::vector<double> a(n), b(n);
  const auto na = noise(n, 6, 0.1), nb = noise(n, 7, 0.1);  // -20 dB
  for (std::size_t t = 0; t < n; ++t) {
    a[t] = std::cos(w * t) + na[t];
    b[t] = std::cos(w * t - 1.0) + nb[t];
  }
  const auto s = coherence_welch(pair_epochs(a, b), {200, 100});
  CHECK(s.n_segments >= 50);
  CHECK(s.values[tone_bin(s, w)] > 0.95);
}

TEST_CASE("independent noise sits at the random-resultant floor") {
  // 99 segments of 100 with overlap 50 need 5000 samples.
  const auto x = pair_epochs(noise(5000, 8), noise(5000, 9));
  const auto s = coherence_welch(x, {100, 50});
  REQUIRE(s.n_segments == 99);
  const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / s.values.size();
  CHECK(std::abs(mean - std::sqrt(kPi / (4.0 * 99))) <= 0.03);
}

TEST_CASE("weighted-phasor form equals Welch") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = pair_epochs(noise(1200, 100 + seed), noise(1200, 200 + seed), 2);
    const auto a = coherence_welch(x, {128, 64});
    const auto b = coherence_weighted_phasor(x, {128, 64});
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t f = 0; f < a.values.size(); ++f) CHECK(std::abs(a.values[f] - b.values[f]) <= 1e-10);
  }
}

TEST_CASE("weighted-phasor form with equal and dominant amplitudes") {
  // Every segment repeats the same channel-a block u. Channel b is
  // cos(lag) u + sin(lag) q with q built so that the tapered spectrum of q at
  // bin f is exactly i times that of u; then X_b(f) = e^{i lag} X_a(f) and all
  // segments share the same amplitude product.
  const std::size_t L = 64, f = 8, segs = 6;
  std::vector<double> taper(L);
  for (std::size_t k = 0; k < L; ++k) taper[k] = 0.54 - 0.46 * std::cos(2.0 * kPi * k / (L - 1));
  const auto u = noise(L, 13);
  std::vector<cplx> tu(L);
  for (std::size_t k = 0; k < L; ++k) tu[k] = taper[k] * u[k];
  const cplx P = testutil::naive_dft(tu)[f];
  const double alpha = -2.0 * P.imag() / L, beta = -2.0 * P.real() / L;
  std::vector<double> q(L);
  for (std::size_t k = 0; k < L; ++k) {
    const double arg = 2.0 * kPi * f * k / L;
    q[k] = (alpha * std::cos(arg) + beta * std::sin(arg)) / taper[k];
  }

  const std::vector<double> lags{0.1, 0.9, -0.4, 2.0, 1.3, -2.2};
  std::vector<double> a(L * segs), b(L * segs);
  for (std::size_t s = 0; s < segs; ++s)
    for (std::size_t k = 0; k < L; ++k) {
      a[s * L + k] = u[k];
      b[s * L + k] = std::cos(lags[s]) * u[k] + std::sin(lags[s]) * q[k];
    }
  const auto eq = coherence_weighted_phasor(pair_epochs(a, b, segs), {L, 0});
  CHECK(std::abs(eq.values[f] - testutil::resultant(lags)) <= 1e-10);

  // Scale one segment by 1e3: weight 1e6 against 1 for the others.
  for (std::size_t k = 0; k < L; ++k) {
    a[3 * L + k] *= 1e3;
    b[3 * L + k] *= 1e3;
  }
  const auto dom = coherence_weighted_phasor(pair_epochs(a, b, segs), {L, 0});
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < segs; ++s) {
    const double wgt = s == 3 ? 1e6 : 1.0;
    num += wgt * std::polar(1.0, lags[s]);
    den += wgt;
  }
  CHECK(dom.values[f] == doctest::Approx(std::abs(num) / den).epsilon(1e-9));
  CHECK(dom.values[f] > 0.999);
}

TEST_CASE("imaginary coherency of shifted tones") {
  const std::size_t L = 128, n = L * 40;
  const double w = 2.0 * kPi * 16.0 / L;
  for (double phi : {kPi / 2, kPi / 6}) {
    std::vector<double> a(n), b(n);
    const auto na = noise(n, 10, 0.01), nb = noise(n, 11, 0.01);
    for (std::size_t t = 0; t < n; ++t) {
      a[t] = std::cos(w * t) + na[t];
      b[t] = std::cos(w * t - phi) + nb[t];
    }
    const auto x = pair_epochs(a, b);
    const auto coh = coherence_welch(x, {L, L / 2});
    const auto ic = imaginary_coherency(x, {L, L / 2});
    const std::size_t k = tone_bin(coh, w);
    CHECK(ic.values[k] == doctest::Approx(std::sin(phi) * coh.values[k]).epsilon(1e-3));
  }
}

TEST_CASE("band aggregation") {
  CoherenceSpectrum flat;
  flat.window_len = 100;
  for (std::size_t k = 0; k <= 50; ++k) {
    flat.freq_axis.push_back(2.0 * kPi * k / 100.0);
    flat.values.push_back(0.3);
  }
  const BandSpec band{0.2 * kPi, 0.4 * kPi};
  CHECK(band_coherence(flat, band, BandMode::Max) == doctest::Approx(0.3));
  CHECK(band_coherence(flat, band, BandMode::Mean) == doctest::Approx(0.3));

  auto peaked = flat;
  peaked.values[15] = 0.9;  // 0.3 pi
  CHECK(band_coherence(peaked, band, BandMode::Max) == doctest::Approx(0.9));
  CHECK(band_coherence(peaked, band, BandMode::Mean) < 0.9);
  // Bins 10..20 inclusive: 0.2 pi and 0.4 pi sit exactly on band edges.
  CHECK(band_coherence(peaked, band, BandMode::Mean) == doctest::Approx((10 * 0.3 + 0.9) / 11.0));

  CHECK((error_code_of([&] { band_coherence(flat, {0.201 * kPi, 0.219 * kPi}, BandMode::Max); }) == ErrorCode::EmptyBand));
}

TEST_CASE("all-pairs coherence matrix") {
  RealEpochs x{Array3<double>(3, 800, 2), std::nullopt};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (auto& v : x.data.flat()) v = g(rng);
  for (std::size_t t = 0; t < 800; ++t)
    for (std::size_t n = 0; n < 2; ++n) x.data(2, t, n) = x.data(0, t, n);
  const BandSpec band{0.1 * kPi, 0.5 * kPi};
  const auto m = coherence_matrix(x, {100, 50}, band, BandMode::Mean);
  CHECK(m.metric == Metric::COH_MEAN);
  CHECK(m(0, 2) == doctest::Approx(1.0));
  CHECK(m(0, 0) == doctest::Approx(1.0));
  const auto pair = coherence_welch(x, 0, 1, {100, 50});
  CHECK(m(0, 1) == doctest::Approx(band_coherence(pair, band, BandMode::Mean)).epsilon(1e-12));
  CHECK(m(1, 0) == m(0, 1));
  CHECK(coherence_matrix(x, {100, 50}, band, BandMode::Max).metric == Metric::COH_MAX);
  CHECK((error_code_of([&] { coherence_welch(x, {100, 50}); }) == ErrorCode::ShapeError));
}
