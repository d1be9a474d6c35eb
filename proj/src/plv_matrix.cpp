#include "phasesync/connectivity.hpp"
#include "phasesync/parallel.hpp"

#include "slices.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace phasesync {
namespace {

using RowMatrixC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Buffers live in std::vector so that their allocation goes through the
// global allocator (and therefore the benchmark's accounting); Eigen only maps them.
ComplexPlv gram_slice(const PhasorEpochs& phasors, PlvMode mode, std::size_t k, std::size_t obs,
                      std::size_t block_rows) {
  const std::size_t nc = phasors.signals();
  const auto n = static_cast<Eigen::Index>(nc);
  const auto t = static_cast<Eigen::Index>(obs);

  std::vector<cplx> z_buf(nc * obs);
  bool any_masked = false;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t o = 0; o < obs; ++o) {
      z_buf[c * obs + o] = detail::slice_at(phasors.data, mode, c, o, k);
      if (phasors.masked_count > 0 && detail::slice_at(phasors.mask, mode, c, o, k)) any_masked = true;
    }
  }
  Eigen::Map<const RowMatrixC> z(z_buf.data(), n, t);

  ComplexPlv out;
  out.n_signals = nc;
  out.n_observations = obs;
  out.values.assign(nc * nc, cplx(0.0, 0.0));
  Eigen::Map<RowMatrixC> gram(out.values.data(), n, n);

  const auto block = static_cast<Eigen::Index>(std::max<std::size_t>(block_rows, 1));
  // Upper triangle only: Hermitian rank update on the diagonal block, plain
  // product for the strip to its right.
  for (Eigen::Index r0 = 0; r0 < n; r0 += block) {
    const Eigen::Index rows = std::min(block, n - r0);
    const Eigen::Index rest = n - r0 - rows;
    gram.block(r0, r0, rows, rows).selfadjointView<Eigen::Upper>().rankUpdate(z.middleRows(r0, rows));
    if (rest > 0) {
      gram.block(r0, r0 + rows, rows, rest).noalias() = z.middleRows(r0, rows) * z.bottomRows(rest).adjoint();
    }
  }

  std::vector<double> counts;
  if (any_masked) {
    std::vector<double> keep_buf(nc * obs);
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t o = 0; o < obs; ++o)
        keep_buf[c * obs + o] = detail::slice_at(phasors.mask, mode, c, o, k) ? 0.0 : 1.0;
    Eigen::Map<const RowMatrixD> keep(keep_buf.data(), n, t);
    counts.assign(nc * nc, 0.0);
    Eigen::Map<RowMatrixD> count_map(counts.data(), n, n);
    for (Eigen::Index r0 = 0; r0 < n; r0 += block) {
      const Eigen::Index rows = std::min(block, n - r0);
      count_map.block(r0, r0, rows, n - r0).noalias() =
          keep.middleRows(r0, rows) * keep.bottomRows(n - r0).transpose();
    }
    out.counts.assign(nc * nc, 0);
  }

  const double inv_obs = 1.0 / static_cast<double>(obs);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = i; j < nc; ++j) {
      cplx v = out.values[i * nc + j];
      if (any_masked) {
        const auto cnt = static_cast<std::size_t>(std::llround(counts[i * nc + j]));
        if (cnt == 0) {
          throw Error(ErrorCode::EmptyEffectiveWindow, "signals " + std::to_string(i) + " and " + std::to_string(j) +
                                                           " share no unmasked samples in slice " + std::to_string(k));
        }
        out.counts[i * nc + j] = cnt;
        out.counts[j * nc + i] = cnt;
        v /= static_cast<double>(cnt);
      } else {
        v *= inv_obs;
      }
      if (i == j) v = cplx(1.0, 0.0);
      out.values[i * nc + j] = v;
      out.values[j * nc + i] = std::conj(v);
    }
  }
  return out;
}

void check_mask(const PhasorEpochs& phasors) {
  if (phasors.masked_count > 0 && !phasors.mask.same_shape(phasors.data)) {
    throw Error(ErrorCode::ShapeError, "phasor mask shape differs from data shape");
  }
}

}  // namespace

std::vector<ComplexPlv> complex_plv(const PhasorEpochs& phasors, PlvMode mode, const GramOptions& options) {
  const auto geom = detail::slice_geometry(phasors.data, mode);
  check_mask(phasors);
  std::vector<ComplexPlv> out(geom.slices);
  parallel_for(geom.slices, options.threads, [&](std::size_t k) {
    out[k] = gram_slice(phasors, mode, k, geom.observations, options.block_rows);
  });
  return out;
}

ConnectivityMatrix derive_metric(const ComplexPlv& c, Metric metric) {
  if (metric != Metric::PLV && metric != Metric::iPLV && metric != Metric::ciPLV) {
    throw Error(ErrorCode::InvalidArgument, "derive_metric handles PLV, iPLV and ciPLV only");
  }
  const std::size_t nc = c.n_signals;
  auto m = detail::blank_matrix(metric, nc, c.n_observations);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = i + 1; j < nc; ++j) {
      const cplx v = c.values[i * nc + j];
      double value = 0.0;
      switch (metric) {
        case Metric::PLV:
          value = std::abs(v);
          break;
        case Metric::iPLV:
          value = std::abs(v.imag());
          break;
        default: {
          const double re = v.real();
          if (std::abs(re) < 1.0 - kCiplvSingularity) value = std::abs(v.imag()) / std::sqrt(1.0 - re * re);
          break;
        }
      }
      m(i, j) = value;
      m(j, i) = value;
    }
    m(i, i) = metric == Metric::PLV ? 1.0 : 0.0;
  }
  return m;
}

namespace {

// Derives each slice as soon as its Gram product is done so that only one
// complex matrix per worker is alive at a time.
ConnectivityStack derive_slices(const PhasorEpochs& phasors, PlvMode mode, const GramOptions& options,
                                Metric metric) {
  const auto geom = detail::slice_geometry(phasors.data, mode);
  check_mask(phasors);
  ConnectivityStack out(geom.slices);
  parallel_for(geom.slices, options.threads, [&](std::size_t k) {
    out[k] = derive_metric(gram_slice(phasors, mode, k, geom.observations, options.block_rows), metric);
  });
  return out;
}

}  // namespace

ConnectivityStack plv_matrix(const PhasorEpochs& phasors, PlvMode mode, const GramOptions& options) {
  return derive_slices(phasors, mode, options, Metric::PLV);
}

ConnectivityStack iplv(const PhasorEpochs& phasors, PlvMode mode, const GramOptions& options) {
  return derive_slices(phasors, mode, options, Metric::iPLV);
}

ConnectivityStack ciplv(const PhasorEpochs& phasors, PlvMode mode, const GramOptions& options) {
  return derive_slices(phasors, mode, options, Metric::ciPLV);
}

}  // namespace phasesync
