#pragma once

#include "phasesync/error.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace phasesync {

using cplx = std::complex<double>;

// Dense row-major [signals x samples x trials] array. The trial index varies
// fastest, which matches the on-disk bundle layout byte for byte.
template <typename T>
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t signals, std::size_t samples, std::size_t trials, T fill = T{})
      : dims_{signals, samples, trials}, data_(signals * samples * trials, fill) {}
  Array3(std::array<std::size_t, 3> dims, std::vector<T> values)
      : dims_(dims), data_(std::move(values)) {
    if (data_.size() != dims[0] * dims[1] * dims[2]) {
      throw Error(ErrorCode::ShapeError, "value count " + std::to_string(data_.size()) +
                                             " does not match dims");
    }
  }

  std::size_t signals() const noexcept { return dims_[0]; }
  std::size_t samples() const noexcept { return dims_[1]; }
  std::size_t trials() const noexcept { return dims_[2]; }
  const std::array<std::size_t, 3>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(std::size_t i, std::size_t t, std::size_t n) const noexcept {
    return (i * dims_[1] + t) * dims_[2] + n;
  }

  T& operator()(std::size_t i, std::size_t t, std::size_t n) noexcept { return data_[index(i, t, n)]; }
  const T& operator()(std::size_t i, std::size_t t, std::size_t n) const noexcept {
    return data_[index(i, t, n)];
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  // Copy of the sample axis for one (signal, trial) pair.
  std::vector<T> series(std::size_t i, std::size_t n) const {
    std::vector<T> out(dims_[1]);
    for (std::size_t t = 0; t < dims_[1]; ++t) out[t] = (*this)(i, t, n);
    return out;
  }

  void set_series(std::size_t i, std::size_t n, std::span<const T> values) {
    if (values.size() != dims_[1]) throw Error(ErrorCode::ShapeError, "series length mismatch");
    for (std::size_t t = 0; t < dims_[1]; ++t) (*this)(i, t, n) = values[t];
  }

  template <typename U>
  bool same_shape(const Array3<U>& other) const noexcept {
    return signals() == other.signals() && samples() == other.samples() && trials() == other.trials();
  }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::vector<T> data_;
};

}  // namespace phasesync
