#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace phasesync::detail {
namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer make_buffer(std::size_t n) {
  return Buffer(fftw_alloc_complex(n == 0 ? 1 : n));
}

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    Buffer in = make_buffer(n);
    Buffer out = make_buffer(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

std::vector<cplx> run(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  fftw_plan plan = cache().get(n, sign);
  Buffer in = make_buffer(n);
  Buffer out = make_buffer(n);
  std::memcpy(in.get(), x.data(), n * sizeof(cplx));
  fftw_execute_dft(plan, in.get(), out.get());
  std::vector<cplx> result(n);
  std::memcpy(static_cast<void*>(result.data()), out.get(), n * sizeof(cplx));
  return result;
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> x) { return run(x, FFTW_FORWARD); }

std::vector<cplx> fft(std::span<const double> x) {
  std::vector<cplx> tmp(x.begin(), x.end());
  return run(tmp, FFTW_FORWARD);
}

std::vector<cplx> ifft(std::span<const cplx> spectrum) {
  auto out = run(spectrum, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace phasesync::detail
