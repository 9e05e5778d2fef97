// Rescaled discrete energies E_n^{(p,q)} = interaction + force + barrier on
// ordered wall positions 0 = x_0 <= x_1 <= ... <= x_n. Only x_1..x_n are
// passed in; the pinned wall at 0 is implicit.

#pragma once

#include <span>
#include <vector>

#include "pileup/scaling.hpp"

namespace pileup::energy {

struct RegimeContext {
  int p = 0;
  int q = 0;
  double alpha_n = 0.0;   // alpha_n^{(q)}
  double Lambda_n = 0.0;  // barrier for q = 1, force prefactor input for q >= 2
  double Cn = 1.0;        // force prefactor, 1 for q in {0, 1}
};

// Context at size n. In the particular case (p = 5, q = 2, beta = inf) this
// is the context of the replacement energy: E^{(5,1)} with alpha_hat_n,
// unit force and barrier Lambda_n.
RegimeContext make_context(const scaling::RegimeReport& report, const scaling::Model& model,
                           int n);

// Throws std::invalid_argument unless 1 <= p <= 5, 0 <= q <= 3, alpha_n > 0, Lambda_n > 0.
void validate(const RegimeContext& ctx);

// Lambda_n (q = 1), 1 (q in {2, 3}) or +inf (q = 0).
double barrier_upper(const RegimeContext& ctx);

double interaction_energy(const RegimeContext& ctx, std::span<const double> x);
double force_energy(const RegimeContext& ctx, std::span<const double> x);
double barrier_energy(const RegimeContext& ctx, std::span<const double> x);
double total_energy(const RegimeContext& ctx, std::span<const double> x);

struct EnergyParts {
  double interaction = 0.0;
  double force = 0.0;
  double barrier = 0.0;
  double total = 0.0;
};
EnergyParts energy_parts(const RegimeContext& ctx, std::span<const double> x);

// Writes dE/dx_i into grad and returns the energy. The configuration must be
// strictly ordered, start above 0 and satisfy the barrier; otherwise throws
// std::domain_error("singular configuration").
double total_gradient(const RegimeContext& ctx, std::span<const double> x,
                      std::span<double> grad);
std::vector<double> total_gradient(const RegimeContext& ctx, std::span<const double> x);

// Hessian diagonal of the interaction part in gap coordinates
// (x_1 - 0, x_2 - x_1, ...); used by the optimizer as a metric.
void interaction_gap_curvature(const RegimeContext& ctx, std::span<const double> x,
                               std::span<double> curv);

// (1 / (2 alpha_n)) log E_n, for p = 5 and q in {2, 3}.
double log_rescaled_energy(const RegimeContext& ctx, std::span<const double> x);

}  // namespace pileup::energy
