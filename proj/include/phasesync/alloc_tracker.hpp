#pragma once

#include <cstddef>

namespace phasesync::alloc {

// Byte accounting for every allocation made through the global operator new
// (which this library replaces). Allocations made with malloc directly, such
// as Eigen's small GEMM packing panels or FFTW work buffers, are not seen.
std::size_t current_bytes() noexcept;
std::size_t peak_bytes() noexcept;
void reset_peak() noexcept;  // peak := current

// Peak growth above the level at construction.
class PeakScope {
 public:
  PeakScope() noexcept;
  std::size_t transient_peak() const noexcept;

 private:
  std::size_t baseline_;
};

}  // namespace phasesync::alloc
