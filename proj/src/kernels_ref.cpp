#include "pileup/kernels.hpp"
#include "pileup/potential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pileup::kernels {

bool strictly_increasing(std::span<const double> nodes) {
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double gap = nodes[i] - nodes[i - 1];
    if (!(gap > 0.0) || !std::isfinite(gap)) return false;
  }
  return true;
}

namespace reference {

double pair_sum(PairKernel kernel, std::span<const double> nodes, double scale) {
  if (!strictly_increasing(nodes)) return std::numeric_limits<double>::infinity();
  const std::size_t count = nodes.size();
  double sum = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    for (std::size_t j = 0; j + k < count; ++j) {
      const double r = scale * (nodes[j + k] - nodes[j]);
      sum += kernel == PairKernel::Wall ? potential::eval_V(r) : -std::log(r);
    }
  }
  return sum;
}

double pair_sum_gradient(PairKernel kernel, std::span<const double> nodes,
                         double scale, std::span<double> grad) {
  if (!strictly_increasing(nodes)) {
    throw std::domain_error("pair_sum_gradient: singular configuration");
  }
  const std::size_t count = nodes.size();
  for (auto& g : grad) g = 0.0;
  double sum = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    for (std::size_t j = 0; j + k < count; ++j) {
      const double r = scale * (nodes[j + k] - nodes[j]);
      double v, dv;
      if (kernel == PairKernel::Wall) {
        v = potential::eval_V(r);
        dv = potential::eval_dV(r);
      } else {
        v = -std::log(r);
        dv = -1.0 / r;
      }
      sum += v;
      grad[j + k] += scale * dv;
      grad[j] -= scale * dv;
    }
  }
  return sum;
}

void pair_gap_curvature(PairKernel kernel, std::span<const double> nodes,
                        double scale, std::span<double> curv) {
  if (nodes.empty() || curv.size() + 1 != nodes.size()) {
    throw std::invalid_argument("pair_gap_curvature: size mismatch");
  }
  if (!strictly_increasing(nodes)) {
    throw std::domain_error("pair_gap_curvature: singular configuration");
  }
  for (auto& c : curv) c = 0.0;
  const std::size_t count = nodes.size();
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t l = j + 1; l < count; ++l) {
      const double r = scale * (nodes[l] - nodes[j]);
      const double w = kernel == PairKernel::Wall
                           ? potential::detail::ddV_pos(r)
                           : 1.0 / (r * r);
      for (std::size_t k = j; k < l; ++k) curv[k] += scale * scale * w;
    }
  }
}

}  // namespace reference
}  // namespace pileup::kernels
