#pragma once

#include "phasesync/array3.hpp"
#include "phasesync/connectivity.hpp"

#include <string>

namespace phasesync::detail {

struct SliceGeometry {
  std::size_t slices = 0;        // output matrices
  std::size_t observations = 0;  // terms averaged per matrix
};

template <typename T>
SliceGeometry slice_geometry(const Array3<T>& a, PlvMode mode) {
  if (a.signals() < 1 || a.samples() < 1 || a.trials() < 1) {
    throw Error(ErrorCode::ShapeError, "connectivity input must be a non-empty [signals x samples x trials] array");
  }
  if (mode == PlvMode::OverSamples) return {a.trials(), a.samples()};
  return {a.samples(), a.trials()};
}

// Element (signal c, observation o) of slice k.
template <typename T>
const T& slice_at(const Array3<T>& a, PlvMode mode, std::size_t c, std::size_t o, std::size_t k) {
  return mode == PlvMode::OverSamples ? a(c, o, k) : a(c, k, o);
}

inline ConnectivityMatrix blank_matrix(Metric metric, std::size_t n, std::size_t obs) {
  ConnectivityMatrix m;
  m.metric = metric;
  m.n_signals = n;
  m.n_observations = obs;
  m.values.assign(n * n, 0.0);
  return m;
}

}  // namespace phasesync::detail
