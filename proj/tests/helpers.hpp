#pragma once

#include "phasesync/array3.hpp"
#include "phasesync/error.hpp"
#include "phasesync/signalprep.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using phasesync::cplx;

using phasesync::kPi;

// Runs `body` and reports the ErrorCode it threw, or fails.
template <typename F>
phasesync::ErrorCode error_code_of(F&& body) {
  try {
    body();
  } catch (const phasesync::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a phasesync::Error");
}

// Collects warnings for the lifetime of the object.
struct WarningCapture {
  std::vector<std::string> messages;
  phasesync::WarningHandler previous;
  WarningCapture() {
    previous = phasesync::set_warning_handler([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { phasesync::set_warning_handler(previous); }
  bool contains(const std::string& needle) const {
    for (const auto& m : messages)
      if (m.find(needle) != std::string::npos) return true;
    return false;
  }
};

// Plain O(n^2) DFT, X[k] = sum x[t] e^{-2 pi i k t / n}.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x, int sign = -1) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * kPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// DTFT of a real FIR at angular frequency w.
inline cplx dtft(const std::vector<double>& h, double w) {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * std::polar(1.0, -w * static_cast<double>(k));
  return acc;
}

inline phasesync::Array3<double> random_phases(std::size_t nc, std::size_t ns, std::size_t nt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  phasesync::Array3<double> a(nc, ns, nt);
  for (auto& v : a.flat()) v = u(rng);
  return a;
}

inline phasesync::Array3<cplx> to_phasors(const phasesync::Array3<double>& phases) {
  phasesync::Array3<cplx> z(phases.signals(), phases.samples(), phases.trials());
  for (std::size_t k = 0; k < phases.size(); ++k) z.flat()[k] = std::polar(1.0, phases.flat()[k]);
  return z;
}

// Mean resultant length of exp(i d_t), written out directly.
inline double resultant(const std::vector<double>& d) {
  double re = 0.0, im = 0.0;
  for (double v : d) {
    re += std::cos(v);
    im += std::sin(v);
  }
  return std::sqrt(re * re + im * im) / static_cast<double>(d.size());
}

}  // namespace testutil
