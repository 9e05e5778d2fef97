#include "pileup/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pileup/kernels.hpp"
#include "pileup/potential.hpp"
#include "pileup/scaling.hpp"

namespace pileup::continuum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kTwoOverE2 = 2.0 * std::exp(-2.0);

// 2 int_0^1 (1 - u) V(a u) du, the average of V(c|x - y|) over a cell of
// width Delta with a = c Delta; expansion to O(a^2), valid for a << 1.
double diag_wall(double a) { return -std::log(a) + 2.5 - std::numbers::ln2 + a * a / 36.0; }
double diag_wall_d(double a) { return -1.0 / a + a / 18.0; }

double gap_weight(int j, int m) {
  if (m == 2) return 1.0;
  return (j == 0 || j == m - 2) ? 1.5 / m : 1.0 / m;
}

// Local gap of cell i from its neighbours.
double local_gap(std::span<const double> xi, int i) {
  const int m = static_cast<int>(xi.size());
  if (i == 0) return xi[1] - xi[0];
  if (i == m - 1) return xi[m - 1] - xi[m - 2];
  return 0.5 * (xi[i + 1] - xi[i - 1]);
}

// Scatter dE/dDelta_i back onto xi.
void scatter_local_gap(int i, double dDelta, std::span<double> grad) {
  const int m = static_cast<int>(grad.size());
  if (i == 0) {
    grad[1] += dDelta;
    grad[0] -= dDelta;
  } else if (i == m - 1) {
    grad[m - 1] += dDelta;
    grad[m - 2] -= dDelta;
  } else {
    grad[i + 1] += 0.5 * dDelta;
    grad[i - 1] -= 0.5 * dDelta;
  }
}

double wall_cutoff(double c, int m) {
  const double weight = c * std::max(1.0, c * m);
  return std::max(1.0, potential::cutoff_distance(1e-18 / weight));
}

// Value at s = 1 of the linear extrapolation of the last two grid values;
// the support bound applies to this, not to the last midpoint value.
double extrapolated_sup(std::span<const double> xi) {
  const std::size_t m = xi.size();
  return xi[m - 1] + 0.5 * (xi[m - 1] - xi[m - 2]);
}

// Same at s = 0.
double extrapolated_inf(std::span<const double> xi) {
  return xi[0] - 0.5 * (xi[1] - xi[0]);
}

constexpr double kBarrierSlack = 1e-12;

bool p5_feasible(int q, std::span<const double> xi) {
  const int m = static_cast<int>(xi.size());
  if (extrapolated_inf(xi) < -kSlopeTol) return false;
  for (int i = 1; i < m; ++i) {
    if (m * (xi[i] - xi[i - 1]) < 1.0 - kSlopeTol) return false;
  }
  if (q >= 2 && extrapolated_sup(xi) > 1.0 + kSlopeTol) return false;
  return true;
}

double p5_value(int q, const LimitConstants& k) {
  const bool finite_domain = q == 3 || (q == 2 && k.Lambda.value_or(1.0) <= 1.0);
  return finite_domain ? kTwoOverE2 : 0.0;
}

// Interaction part and (optionally) its gradient, p <= 4, on a strictly
// increasing grid.
double interaction_quantile(int p, const LimitConstants& k, std::span<const double> xi,
                            double* grad_out) {
  const int m = static_cast<int>(xi.size());
  const double inv_m2 = 1.0 / (static_cast<double>(m) * m);
  std::vector<double> grad;
  if (grad_out) grad.assign(static_cast<std::size_t>(m), 0.0);
  double e = 0.0;

  if (p == 1 || p == 2) {
    const double c = p == 2 ? *k.c_tilde : 1.0;
    const auto kernel = p == 2 ? kernels::PairKernel::Wall : kernels::PairKernel::NegLog;
    const double cutoff = p == 2 ? wall_cutoff(c, m) : kInf;
    const double pair_weight = p == 2 ? c * inv_m2 : inv_m2;
    double sum;
    if (grad_out) {
      std::vector<double> g(static_cast<std::size_t>(m));
      sum = kernels::pair_sum_gradient(kernel, xi, c, cutoff, g);
      for (int i = 0; i < m; ++i) grad[i] = pair_weight * g[i];
    } else {
      sum = kernels::pair_sum(kernel, xi, c, cutoff);
    }
    e = pair_weight * sum;
    const double diag_weight = 0.5 * (p == 2 ? c : 1.0) * inv_m2;
    for (int i = 0; i < m; ++i) {
      const double delta = local_gap(xi, i);
      if (p == 1) {
        e += diag_weight * (-std::log(delta) + 1.5);
        if (grad_out) scatter_local_gap(i, -diag_weight / delta, grad);
      } else {
        e += diag_weight * diag_wall(c * delta);
        if (grad_out) scatter_local_gap(i, diag_weight * c * diag_wall_d(c * delta), grad);
      }
    }
  } else {
    const double cV = potential::integral_V();
    for (int j = 0; j + 1 < m; ++j) {
      const double w = gap_weight(j, m);
      const double d = m * (xi[j + 1] - xi[j]);
      double de;
      if (p == 3) {
        e += cV * w / d;
        de = -cV * w / (d * d);
      } else {
        const double c = *k.c_tilde;
        e += c * w * potential::sum_V_multiples(c * d);
        de = c * w * c * potential::sum_k_dV_multiples(c * d);
      }
      if (grad_out) {
        grad[j + 1] += de * m;
        grad[j] -= de * m;
      }
    }
  }
  if (grad_out) std::copy(grad.begin(), grad.end(), grad_out);
  return e;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void validate(int p, int q, const LimitConstants& k) {
  if (p < 1 || p > 5) throw std::invalid_argument("limit energy: p must be in 1..5");
  if (q < 0 || q > 3) throw std::invalid_argument("limit energy: q must be in 0..3");
  if ((p == 2 || p == 4) && !(k.c_tilde && *k.c_tilde > 0.0)) {
    throw std::invalid_argument("limit energy: p = 2 and p = 4 need c_tilde > 0");
  }
  if (q == 2) {
    if (p == 5) {
      if (!k.beta) throw std::invalid_argument("limit energy: p = 5, q = 2 needs beta");
      if (std::isinf(*k.beta)) throw scaling::ParticularCaseError();
    } else if (!k.C) {
      throw std::invalid_argument("limit energy: q = 2 needs C");
    }
  }
}

double force_coefficient(int p, int q, const LimitConstants& k) {
  if (q <= 1) return 1.0;
  if (q == 3) return 0.0;
  return p == 5 ? *k.beta : *k.C;
}

LimitParts limit_energy_parts(int p, int q, const LimitConstants& k,
                              const measures::QuantileFn& xi) {
  validate(p, q, k);
  const int m = xi.m();
  if (m < 2) throw std::invalid_argument("limit energy: quantile grid needs m >= 2");
  const std::span<const double> v(xi.values);
  LimitParts parts;
  parts.force = force_coefficient(p, q, k) * mean(v);
  if (p == 5) {
    parts.interaction = p5_feasible(q, v) ? p5_value(q, k) : kInf;
  } else {
    const bool ok = extrapolated_inf(v) >= -kBarrierSlack && kernels::strictly_increasing(v);
    parts.interaction = ok ? interaction_quantile(p, k, v, nullptr) : kInf;
    if (q >= 2 && extrapolated_sup(v) > 1.0 + kBarrierSlack) parts.barrier = kInf;
  }
  parts.total = parts.interaction + parts.force + parts.barrier;
  return parts;
}

double limit_energy(int p, int q, const LimitConstants& k, const measures::QuantileFn& xi) {
  return limit_energy_parts(p, q, k, xi).total;
}

double limit_energy(int p, int q, const LimitConstants& k, const measures::GridDensity& rho) {
  validate(p, q, k);
  const int m = rho.m();
  if (m < 1 || !(rho.width > 0.0)) throw std::invalid_argument("limit energy: empty grid");
  double mass = 0.0;
  for (double w : rho.weights) {
    if (w < 0.0) throw std::invalid_argument("limit energy: negative cell mass");
    mass += w;
  }
  if (std::fabs(mass - 1.0) > 1e-12) throw std::invalid_argument("limit energy: mass must be 1");

  const double h = rho.cell_width();
  auto x = [h](int i) { return (i + 0.5) * h; };
  double inter = 0.0;
  switch (p) {
    case 1:
    case 2: {
      const double c = p == 2 ? *k.c_tilde : 1.0;
      double off = 0.0, diag = 0.0;
      for (int i = 0; i < m; ++i) {
        const double wi = rho.weights[i];
        if (wi == 0.0) continue;
        for (int j = i + 1; j < m; ++j) {
          const double wj = rho.weights[j];
          if (wj == 0.0) continue;
          const double r = c * (x(j) - x(i));
          off += wi * wj * (p == 2 ? potential::eval_V(r) : -std::log(r));
        }
        diag += wi * wi * (p == 2 ? diag_wall(c * h) : -std::log(h) + 1.5);
      }
      inter = 0.5 * c * (2.0 * off + diag);
      break;
    }
    case 3: {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += rho.density(i) * rho.density(i) * h;
      inter = potential::integral_V() * s;
      break;
    }
    case 4: {
      const double c = *k.c_tilde;
      double s = 0.0;
      for (int i = 0; i < m; ++i) {
        const double r = rho.density(i);
        if (r > 0.0) s += h * r * potential::sum_V_multiples(c / r);
      }
      inter = c * s;
      break;
    }
    default: {
      bool ok = true;
      for (int i = 0; i < m; ++i) ok = ok && rho.density(i) <= 1.0 + kSlopeTol;
      inter = ok ? p5_value(q, k) : kInf;
    }
  }
  double first_moment = 0.0;
  int last = -1;
  for (int i = 0; i < m; ++i) {
    first_moment += rho.weights[i] * x(i);
    if (rho.weights[i] > 0.0) last = i;
  }
  const double barrier = (q >= 2 && (last + 1) * h > 1.0 + 1e-12) ? kInf : 0.0;
  return inter + force_coefficient(p, q, k) * first_moment + barrier;
}

double particular_case_energy(double Lambda, const measures::QuantileFn& xi) {
  const int m = xi.m();
  if (m < 2) throw std::invalid_argument("particular_case_energy: grid needs m >= 2");
  const std::span<const double> v(xi.values);
  if (!p5_feasible(0, v)) return kInf;
  if (extrapolated_sup(v) > Lambda + kSlopeTol) return kInf;
  return mean(v);
}

double log_limit_energy(const measures::GridDensity& rho) {
  const double h = rho.cell_width();
  for (int i = 0; i < rho.m(); ++i) {
    if (rho.weights[i] > 0.0 && (i + 1) * h > 1.0 + 1e-12) return kInf;
  }
  return 1.0 - 1.0 / measures::max_density_ratio(rho);
}

double log_limit_energy(const measures::EmpiricalMeasure& mu) {
  for (double a : mu.atoms) {
    if (a < 0.0 || a > 1.0) return kInf;
  }
  return 1.0 - 1.0 / measures::max_density_ratio(mu);
}

QuantileEnergy::QuantileEnergy(int p, int q, LimitConstants k, int m)
    : p_(p), q_(q), m_(m), k_(std::move(k)) {
  validate(p_, q_, k_);
  if (m_ < 2) throw std::invalid_argument("QuantileEnergy: m must be >= 2");
  force_coeff_ = force_coefficient(p_, q_, k_);
}

double QuantileEnergy::value(std::span<const double> xi) const {
  measures::QuantileFn f{std::vector<double>(xi.begin(), xi.end())};
  return limit_energy(p_, q_, k_, f);
}

double QuantileEnergy::value_and_gradient(std::span<const double> xi,
                                          std::span<double> grad) const {
  const double e = value(xi);
  if (p_ == 5) {
    std::fill(grad.begin(), grad.end(), force_coeff_ / m_);
    return e;
  }
  if (!kernels::strictly_increasing(xi)) throw std::domain_error("singular configuration");
  interaction_quantile(p_, k_, xi, grad.data());
  for (double& g : grad) g += force_coeff_ / m_;
  return e;
}

bool QuantileEnergy::gap_curvature(std::span<const double> xi, std::span<double> curv) const {
  if (p_ == 5) return false;
  const int m = m_;
  std::fill(curv.begin(), curv.end(), 0.0);
  const double md = static_cast<double>(m);
  if (p_ == 1 || p_ == 2) {
    const double c = p_ == 2 ? *k_.c_tilde : 1.0;
    const auto kernel = p_ == 2 ? kernels::PairKernel::Wall : kernels::PairKernel::NegLog;
    const double cutoff = p_ == 2 ? wall_cutoff(c, m) : kInf;
    const double pair_weight = (p_ == 2 ? c : 1.0) / (md * md);
    kernels::pair_gap_curvature(kernel, xi, c, cutoff, curv.subspan(1));
    for (double& v : curv) v *= pair_weight;
    // Diagonal cells behave like -log(local gap).
    const double diag_weight = 0.5 * (p_ == 2 ? c : 1.0) / (md * md);
    for (int i = 0; i < m; ++i) {
      const double delta = local_gap(xi, i);
      const double k2 = diag_weight / (delta * delta);
      if (i == 0) {
        curv[1] += k2;
      } else if (i == m - 1) {
        curv[m - 1] += k2;
      } else {
        curv[i] += 0.25 * k2;
        curv[i + 1] += 0.25 * k2;
      }
    }
    return true;
  }
  const double cV = potential::integral_V();
  for (int j = 0; j + 1 < m; ++j) {
    const double w = gap_weight(j, m);
    const double d = md * (xi[j + 1] - xi[j]);
    double dd;
    if (p_ == 3) {
      dd = 2.0 * cV * w / (d * d * d);
    } else {
      const double c = *k_.c_tilde;
      double s = 0.0;
      for (long kk = 1;; ++kk) {
        const double r = static_cast<double>(kk) * c * d;
        const double t = static_cast<double>(kk * kk) * potential::detail::ddV_pos(r);
        s += t;
        if (r > 1.0 && t < 1e-16 * s) break;
      }
      dd = c * w * c * c * s;
    }
    curv[j + 1] = dd * md * md;
  }
  return true;
}

opt::SolveReport minimize_limit(int p, int q, const LimitConstants& k, int m,
                                const opt::SolverOptions& options) {
  QuantileEnergy f(p, q, k, m);
  const double upper = q >= 2 ? 1.0 : kInf;
  if (p == 5) return opt::minimize_quantile(f, m, upper, options, std::nullopt, 1.0);
  return opt::minimize_quantile(f, m, upper, options);
}

opt::SolveReport minimize_particular_case(double Lambda, int m) {
  opt::SolveReport rep;
  rep.minimizer.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) rep.minimizer[i] = measures::QuantileFn::node(i, m);
  rep.objective = particular_case_energy(Lambda, measures::QuantileFn{rep.minimizer});
  rep.kkt_residual = 0.0;
  rep.converged = std::isfinite(rep.objective);
  rep.message = rep.converged ? "forced minimizer" : "Lambda < 1: empty feasible set";
  return rep;
}

}  // namespace pileup::continuum
