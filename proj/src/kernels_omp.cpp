#include "pileup/kernels.hpp"
#include "pileup/potential.hpp"
#include "pileup/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pileup::kernels {

namespace {

// Gradient scatter goes through this many private buffers, each owning the
// rows j == c (mod kChunks). The count is fixed, so the reduction order does
// not depend on how many threads run.
constexpr std::size_t kChunks = 64;

template <PairKernel K>
double row_sum(std::span<const double> nodes, std::size_t j, double scale, double cutoff) {
  const double xj = nodes[j];
  double s = 0.0;
  for (std::size_t l = j + 1; l < nodes.size(); ++l) {
    const double r = scale * (nodes[l] - xj);
    if constexpr (K == PairKernel::Wall) {
      if (r > cutoff) break;
      s += potential::detail::V_pos(r);
    } else {
      s -= std::log(r);
    }
  }
  return s;
}

template <PairKernel K>
double row_sum_gradient(std::span<const double> nodes, std::size_t j, double scale,
                        double cutoff, double* buf) {
  const double xj = nodes[j];
  double s = 0.0;
  double gj = 0.0;
  for (std::size_t l = j + 1; l < nodes.size(); ++l) {
    const double r = scale * (nodes[l] - xj);
    double v, dv;
    if constexpr (K == PairKernel::Wall) {
      if (r > cutoff) break;
      potential::detail::V_dV_pos(r, v, dv);
    } else {
      v = -std::log(r);
      dv = -1.0 / r;
    }
    s += v;
    buf[l] += scale * dv;
    gj -= scale * dv;
  }
  buf[j] += gj;
  return s;
}

template <PairKernel K>
double sum_impl(std::span<const double> nodes, double scale, double cutoff) {
  const std::size_t rows = nodes.size();
  std::vector<double> partial(rows, 0.0);
  const long long nrows = static_cast<long long>(rows);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long j = 0; j < nrows; ++j) {
    partial[j] = row_sum<K>(nodes, static_cast<std::size_t>(j), scale, cutoff);
  }
  return pairwise_sum(partial);
}

template <PairKernel K>
double gradient_impl(std::span<const double> nodes, double scale, double cutoff,
                     std::span<double> grad) {
  const std::size_t rows = nodes.size();
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(rows, 1));
  std::vector<double> partial(rows, 0.0);
  std::vector<double> buffers(chunks * rows, 0.0);
  const long long nchunks = static_cast<long long>(chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long c = 0; c < nchunks; ++c) {
    double* buf = buffers.data() + static_cast<std::size_t>(c) * rows;
    for (std::size_t j = static_cast<std::size_t>(c); j < rows; j += chunks) {
      partial[j] = row_sum_gradient<K>(nodes, j, scale, cutoff, buf);
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    double g = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) g += buffers[c * rows + i];
    grad[i] = g;
  }
  return pairwise_sum(partial);
}

template <PairKernel K>
void curvature_impl(std::span<const double> nodes, double scale, double cutoff,
                    std::span<double> curv) {
  // Each pair (j, l) touches gaps j..l-1: difference array per chunk.
  const std::size_t rows = nodes.size();
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(rows, 1));
  std::vector<double> buffers(chunks * (rows + 1), 0.0);
  const long long nchunks = static_cast<long long>(chunks);
  const double s2 = scale * scale;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long c = 0; c < nchunks; ++c) {
    double* buf = buffers.data() + static_cast<std::size_t>(c) * (rows + 1);
    for (std::size_t j = static_cast<std::size_t>(c); j < rows; j += chunks) {
      const double xj = nodes[j];
      double start = 0.0;
      for (std::size_t l = j + 1; l < rows; ++l) {
        const double r = scale * (nodes[l] - xj);
        double w;
        if constexpr (K == PairKernel::Wall) {
          if (r > cutoff) break;
          w = s2 * potential::detail::ddV_pos(r);
        } else {
          w = s2 / (r * r);
        }
        start += w;
        buf[l] -= w;
      }
      buf[j] += start;
    }
  }
  double run = 0.0;
  for (std::size_t k = 0; k + 1 < rows; ++k) {
    double d = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) d += buffers[c * (rows + 1) + k];
    run += d;
    curv[k] = run;
  }
}

}  // namespace

double pair_sum(PairKernel kernel, std::span<const double> nodes, double scale,
                double cutoff) {
  if (!strictly_increasing(nodes)) return std::numeric_limits<double>::infinity();
  if (kernel == PairKernel::Wall) return sum_impl<PairKernel::Wall>(nodes, scale, cutoff);
  return sum_impl<PairKernel::NegLog>(nodes, scale, cutoff);
}

double pair_sum_gradient(PairKernel kernel, std::span<const double> nodes,
                         double scale, double cutoff, std::span<double> grad) {
  if (grad.size() != nodes.size()) {
    throw std::invalid_argument("pair_sum_gradient: gradient size mismatch");
  }
  if (!strictly_increasing(nodes)) {
    throw std::domain_error("pair_sum_gradient: singular configuration");
  }
  if (kernel == PairKernel::Wall) {
    return gradient_impl<PairKernel::Wall>(nodes, scale, cutoff, grad);
  }
  return gradient_impl<PairKernel::NegLog>(nodes, scale, cutoff, grad);
}

}  // namespace pileup::kernels

namespace pileup::kernels {

void pair_gap_curvature(PairKernel kernel, std::span<const double> nodes,
                        double scale, double cutoff, std::span<double> curv) {
  if (nodes.empty() || curv.size() + 1 != nodes.size()) {
    throw std::invalid_argument("pair_gap_curvature: size mismatch");
  }
  if (!strictly_increasing(nodes)) {
    throw std::domain_error("pair_gap_curvature: singular configuration");
  }
  if (kernel == PairKernel::Wall) {
    curvature_impl<PairKernel::Wall>(nodes, scale, cutoff, curv);
  } else {
    curvature_impl<PairKernel::NegLog>(nodes, scale, cutoff, curv);
  }
}

}  // namespace pileup::kernels
