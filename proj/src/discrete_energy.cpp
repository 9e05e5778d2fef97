#include "pileup/discrete_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pileup/kernels.hpp"
#include "pileup/potential.hpp"

namespace pileup::energy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pair terms below this (after prefactor) are dropped, for the energy and
// for each gradient component.
constexpr double kNegligible = 1e-18;

// Relative slack on the barrier per position: x_n rebuilt from n gaps by
// summation carries up to ~n ulps of rounding.
constexpr double kBarrierUlps = 4.0;

double interaction_prefactor(const RegimeContext& ctx, int n) {
  const double a = ctx.alpha_n;
  switch (ctx.p) {
    case 1:
      return 1.0 / (static_cast<double>(n) * n);
    case 2:
    case 3:
    case 4:
      return a / n;
    default:
      return std::exp(2.0 * (a - 1.0)) / (n * a);
  }
}

double interaction_offset(const RegimeContext& ctx, int n) {
  if (ctx.p != 1) return 0.0;
  return -0.5 * (1.0 - std::log(2.0 * n * ctx.alpha_n));
}

double pair_cutoff(double prefactor, double scale, int n) {
  const double nd = static_cast<double>(n);
  // |V'| <= 2 V past r = 1, so bounding V bounds both the energy sum and
  // each gradient component.
  const double weight = prefactor * std::max(0.5 * nd * (nd + 1.0), 2.0 * scale * nd);
  return std::max(1.0, potential::cutoff_distance(kNegligible / weight));
}

std::vector<double> with_origin(std::span<const double> x) {
  std::vector<double> nodes(x.size() + 1);
  nodes[0] = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) nodes[i + 1] = x[i];
  return nodes;
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

RegimeContext make_context(const scaling::RegimeReport& report, const scaling::Model& model,
                           int n) {
  const double nd = static_cast<double>(n);
  RegimeContext ctx;
  ctx.p = report.p;
  if (report.particular_case()) {
    ctx.q = 1;
    ctx.alpha_n = scaling::ahat(nd, model);
    ctx.Lambda_n = scaling::Lambda(nd, model);
    ctx.Cn = 1.0;
    return ctx;
  }
  ctx.q = report.q;
  ctx.Lambda_n = scaling::Lambda(nd, model);
  if (report.q >= 2) {
    ctx.alpha_n = scaling::alpha(nd, model);
    ctx.Cn = scaling::force_prefactor(report.p, ctx.alpha_n, ctx.Lambda_n);
  } else {
    ctx.alpha_n = scaling::ahat(nd, model);
    ctx.Cn = 1.0;
  }
  return ctx;
}

void validate(const RegimeContext& ctx) {
  if (ctx.p < 1 || ctx.p > 5) throw std::invalid_argument("regime context: p must be in 1..5");
  if (ctx.q < 0 || ctx.q > 3) throw std::invalid_argument("regime context: q must be in 0..3");
  if (!(ctx.alpha_n > 0.0) || std::isinf(ctx.alpha_n)) {
    throw std::invalid_argument("regime context: alpha_n must be positive and finite");
  }
  if (!(ctx.Lambda_n > 0.0)) throw std::invalid_argument("regime context: Lambda_n must be positive");
}

double barrier_upper(const RegimeContext& ctx) {
  if (ctx.q == 0) return kInf;
  if (ctx.q == 1) return ctx.Lambda_n;
  return 1.0;
}

double interaction_energy(const RegimeContext& ctx, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return 0.0;
  const auto nodes = with_origin(x);
  const double prefactor = interaction_prefactor(ctx, n);
  const double scale = n * ctx.alpha_n;
  const double sum = kernels::pair_sum(kernels::PairKernel::Wall, nodes, scale,
                                       pair_cutoff(prefactor, scale, n));
  if (std::isinf(sum)) return kInf;
  return prefactor * sum + interaction_offset(ctx, n);
}

double force_energy(const RegimeContext& ctx, std::span<const double> x) {
  if (x.empty()) return 0.0;
  return (ctx.q >= 2 ? ctx.Cn : 1.0) * mean(x);
}

double barrier_energy(const RegimeContext& ctx, std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double upper = barrier_upper(ctx);
  const double slack = kBarrierUlps * static_cast<double>(x.size()) *
                       std::numeric_limits<double>::epsilon() * upper;
  return x.back() <= upper + slack ? 0.0 : kInf;
}

EnergyParts energy_parts(const RegimeContext& ctx, std::span<const double> x) {
  EnergyParts parts;
  parts.interaction = interaction_energy(ctx, x);
  parts.force = force_energy(ctx, x);
  parts.barrier = barrier_energy(ctx, x);
  parts.total = parts.interaction + parts.force + parts.barrier;
  return parts;
}

double total_energy(const RegimeContext& ctx, std::span<const double> x) {
  if (barrier_energy(ctx, x) > 0.0) return kInf;
  return interaction_energy(ctx, x) + force_energy(ctx, x);
}

double total_gradient(const RegimeContext& ctx, std::span<const double> x,
                      std::span<double> grad) {
  const int n = static_cast<int>(x.size());
  if (grad.size() != x.size()) throw std::invalid_argument("total_gradient: size mismatch");
  if (n == 0) return 0.0;
  if (barrier_energy(ctx, x) > 0.0) throw std::domain_error("singular configuration");
  const auto nodes = with_origin(x);
  if (!kernels::strictly_increasing(nodes)) throw std::domain_error("singular configuration");

  const double prefactor = interaction_prefactor(ctx, n);
  const double scale = n * ctx.alpha_n;
  std::vector<double> g(nodes.size());
  const double sum = kernels::pair_sum_gradient(kernels::PairKernel::Wall, nodes, scale,
                                                pair_cutoff(prefactor, scale, n), g);
  const double force_coeff = (ctx.q >= 2 ? ctx.Cn : 1.0) / n;
  for (int i = 0; i < n; ++i) grad[i] = prefactor * g[i + 1] + force_coeff;
  return prefactor * sum + interaction_offset(ctx, n) + force_energy(ctx, x);
}

void interaction_gap_curvature(const RegimeContext& ctx, std::span<const double> x,
                               std::span<double> curv) {
  const int n = static_cast<int>(x.size());
  if (curv.size() != x.size()) throw std::invalid_argument("gap curvature: size mismatch");
  if (n == 0) return;
  const auto nodes = with_origin(x);
  const double prefactor = interaction_prefactor(ctx, n);
  const double scale = n * ctx.alpha_n;
  kernels::pair_gap_curvature(kernels::PairKernel::Wall, nodes, scale,
                              pair_cutoff(prefactor, scale, n), curv);
  for (double& c : curv) c *= prefactor;
}

std::vector<double> total_gradient(const RegimeContext& ctx, std::span<const double> x) {
  std::vector<double> grad(x.size());
  total_gradient(ctx, x, grad);
  return grad;
}

double log_rescaled_energy(const RegimeContext& ctx, std::span<const double> x) {
  if (ctx.p != 5 || ctx.q < 2) {
    throw std::invalid_argument("log_rescaled_energy: requires p = 5 and q in {2, 3}");
  }
  const double e = total_energy(ctx, x);
  if (std::isinf(e)) return kInf;
  return std::log(e) / (2.0 * ctx.alpha_n);
}

}  // namespace pileup::energy
