// Gamma-limit energies E^{(p,q)}, the particular-case energy and the
// log-limit functional, discretized in quantile coordinates on the midpoint
// grid s_i = (i - 1/2)/m (or in density coordinates on a uniform grid).
//
// Quantile discretization, with d_i = m (xi_{i+1} - xi_i) the slope on the
// i-th gap and w_i = 1/m for interior gaps, 3/(2m) for the two end gaps
// (they also cover the half cells at s = 0 and s = 1):
//   p = 1:  (1/m^2) sum_{i<j} -log(xi_j - xi_i) + diagonal cells
//   p = 2:  (c/m^2) sum_{i<j} V(c (xi_j - xi_i)) + diagonal cells
//   p = 3:  (int V) sum w_i / d_i
//   p = 4:  c sum w_i S(c d_i),   S(t) = sum_k V(k t)
//   p = 5:  indicator of xi' >= 1, value 2 e^{-2} 1{Lambda <= 1}
// Diagonal cells use the exact cell average of the log kernel for the local
// gap Delta_i (central difference of neighbours). The end gaps carry the
// half cells, so the support constraints apply to the linear extrapolations
// to s = 0 and s = 1: (3 xi_1 - xi_2) / 2 >= 0 and, for q >= 2,
// (3 xi_m - xi_{m-1}) / 2 <= 1.

#pragma once

#include <optional>

#include "pileup/measures.hpp"
#include "pileup/optimizer.hpp"

namespace pileup::continuum {

struct LimitConstants {
  std::optional<double> c_tilde;
  std::optional<double> Lambda;
  std::optional<double> beta;
  std::optional<double> C;
};

// Tolerance on xi' >= 1 and on the matching support bounds for p = 5.
inline constexpr double kSlopeTol = 1e-9;

// Throws std::invalid_argument if a constant required by (p, q) is missing,
// and scaling::ParticularCaseError for p = 5, q = 2, beta = inf.
void validate(int p, int q, const LimitConstants& k);

double limit_energy(int p, int q, const LimitConstants& k, const measures::QuantileFn& xi);
double limit_energy(int p, int q, const LimitConstants& k, const measures::GridDensity& rho);

struct LimitParts {
  double interaction = 0.0;
  double force = 0.0;
  double barrier = 0.0;
  double total = 0.0;
};
LimitParts limit_energy_parts(int p, int q, const LimitConstants& k,
                              const measures::QuantileFn& xi);

// E-hat = 0 + int xi + chi{sup xi <= Lambda}, finite only when xi' >= 1.
double particular_case_energy(double Lambda, const measures::QuantileFn& xi);

// 1 - 1/M_mu if the support lies in [0, 1], else +inf.
double log_limit_energy(const measures::GridDensity& rho);
double log_limit_energy(const measures::EmpiricalMeasure& mu);

// E^{(p,q)} on the quantile grid as an optimizer objective (p <= 4).
class QuantileEnergy : public opt::Objective {
 public:
  QuantileEnergy(int p, int q, LimitConstants k, int m);
  std::size_t dimension() const override { return static_cast<std::size_t>(m_); }
  double value(std::span<const double> xi) const override;
  double value_and_gradient(std::span<const double> xi, std::span<double> grad) const override;
  bool gap_curvature(std::span<const double> xi, std::span<double> curv) const override;

 private:
  int p_, q_, m_;
  LimitConstants k_;
  double force_coeff_;
};

// Force prefactor in the quantile form: 1 (q <= 1), C (q = 2, p <= 4),
// beta (q = 2, p = 5), 0 (q = 3).
double force_coefficient(int p, int q, const LimitConstants& k);

// Minimizes the discretized E^{(p,q)}. For p = 5 the feasible set on the
// grid is the single point xi(s) = s, which is returned directly.
opt::SolveReport minimize_limit(int p, int q, const LimitConstants& k, int m,
                                const opt::SolverOptions& options = {});

// Minimizer of E-hat: xi(s) = s.
opt::SolveReport minimize_particular_case(double Lambda, int m);

}  // namespace pileup::continuum
