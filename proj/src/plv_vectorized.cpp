// Built with -ffast-math so the inner loop maps onto the vector sin/cos kernels.
#include "phasesync/connectivity.hpp"

#include "slices.hpp"

#include <cmath>

namespace phasesync {

ConnectivityStack plv_vectorized(const Array3<double>& phases, PlvMode mode) {
  const auto geom = detail::slice_geometry(phases, mode);
  const std::size_t nc = phases.signals();
  const std::size_t obs = geom.observations;
  const double inv_obs = 1.0 / static_cast<double>(obs);

  std::vector<double> slab(obs * nc);
  std::vector<double> acc_re(nc * nc);
  std::vector<double> acc_im(nc * nc);

  ConnectivityStack out;
  out.reserve(geom.slices);
  for (std::size_t k = 0; k < geom.slices; ++k) {
    for (std::size_t o = 0; o < obs; ++o)
      for (std::size_t c = 0; c < nc; ++c) slab[o * nc + c] = detail::slice_at(phases, mode, c, o, k);
    std::fill(acc_re.begin(), acc_re.end(), 0.0);
    std::fill(acc_im.begin(), acc_im.end(), 0.0);

    // Every signal against all others for one observation at a time.
    for (std::size_t o = 0; o < obs; ++o) {
      const double* p = slab.data() + o * nc;
      for (std::size_t i = 0; i < nc; ++i) {
        const double pi = p[i];
        double* re = acc_re.data() + i * nc;
        double* im = acc_im.data() + i * nc;
        // Separate loops: a fused sin/cos call has no vector variant.
#pragma omp simd
        for (std::size_t j = 0; j < nc; ++j) re[j] += std::cos(pi - p[j]);
#pragma omp simd
        for (std::size_t j = 0; j < nc; ++j) im[j] += std::sin(pi - p[j]);
      }
    }

    auto m = detail::blank_matrix(Metric::PLV, nc, obs);
    for (std::size_t i = 0; i < nc; ++i) {
      m(i, i) = 1.0;
      for (std::size_t j = i + 1; j < nc; ++j) {
        const double v = std::sqrt(acc_re[i * nc + j] * acc_re[i * nc + j] + acc_im[i * nc + j] * acc_im[i * nc + j]) *
                         inv_obs;
        m(i, j) = v;
        m(j, i) = v;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace phasesync
