#include "phasesync/connectivity.hpp"

#include "slices.hpp"

#include <cmath>
#include <vector>

namespace phasesync {

ConnectivityStack plv_reference(const Array3<double>& phases, PlvMode mode) {
  const auto geom = detail::slice_geometry(phases, mode);
  const std::size_t nc = phases.signals();
  const double inv_obs = 1.0 / static_cast<double>(geom.observations);

  const std::size_t obs = geom.observations;

  std::vector<double> slab(nc * obs);  // signal-major copy of one slice
  ConnectivityStack out;
  out.reserve(geom.slices);
  for (std::size_t k = 0; k < geom.slices; ++k) {
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t o = 0; o < obs; ++o) slab[c * obs + o] = detail::slice_at(phases, mode, c, o, k);
    auto m = detail::blank_matrix(Metric::PLV, nc, obs);
    for (std::size_t c1 = 0; c1 < nc; ++c1) {
      m(c1, c1) = 1.0;
      const double* p1 = slab.data() + c1 * obs;
      for (std::size_t c2 = c1 + 1; c2 < nc; ++c2) {
        const double* p2 = slab.data() + c2 * obs;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t o = 0; o < obs; ++o) {
          const double d = p1[o] - p2[o];
          re += std::cos(d);
          im += std::sin(d);
        }
        const double v = std::hypot(re, im) * inv_obs;
        m(c1, c2) = v;
        m(c2, c1) = v;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace phasesync
