#pragma once

#include "phasesync/array3.hpp"

#include <span>
#include <vector>

namespace phasesync::detail {

// Thin FFTW wrapper. Plans are cached per (length, direction) behind a mutex;
// execution uses private buffers so concurrent calls are safe.
std::vector<cplx> fft(std::span<const cplx> x);
std::vector<cplx> fft(std::span<const double> x);
// Inverse transform scaled by 1/n.
std::vector<cplx> ifft(std::span<const cplx> spectrum);

}  // namespace phasesync::detail
