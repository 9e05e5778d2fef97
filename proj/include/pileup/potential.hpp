// Wall-wall interaction potential
//
//   V(r) = r coth r - log|sinh r| - log 2
//
// evaluated through the equivalent form 2r/(e^{2r}-1) - log(1-e^{-2r}),
// which stays accurate for large r where coth and sinh overflow.

#pragma once

#include <cmath>

namespace pileup::potential {

/// Below this |r| the small-argument series is used.
inline constexpr double kSeriesBranch = 1e-4;

namespace detail {

// V and V' for a > 0, no argument checks. Shared by the hot kernels.
inline double V_pos(double a) {
  if (a < kSeriesBranch) {
    const double a2 = a * a;
    return -std::log(2.0 * a) + 1.0 + a2 / 6.0 - a2 * a2 / 60.0;
  }
  if (a < 0.35) {
    const double em = -std::expm1(-2.0 * a);  // 1 - e^{-2a}
    const double e = 1.0 - em;
    return 2.0 * a * e / em - std::log(em);
  }
  const double e = std::exp(-2.0 * a);
  return 2.0 * a * e / (1.0 - e) - std::log1p(-e);
}

inline double dV_pos(double a) {
  if (a < kSeriesBranch) {
    const double a2 = a * a;
    return -1.0 / a + a / 3.0 - a * a2 / 15.0;
  }
  double e, em;
  if (a < 0.35) {
    em = -std::expm1(-2.0 * a);
    e = 1.0 - em;
  } else {
    e = std::exp(-2.0 * a);
    em = 1.0 - e;
  }
  return -4.0 * a * e / (em * em);
}

// Both at once; one exponential instead of two.
inline void V_dV_pos(double a, double& v, double& dv) {
  if (a < kSeriesBranch) {
    const double a2 = a * a;
    v = -std::log(2.0 * a) + 1.0 + a2 / 6.0 - a2 * a2 / 60.0;
    dv = -1.0 / a + a / 3.0 - a * a2 / 15.0;
    return;
  }
  double e, em, lg;
  if (a < 0.35) {
    em = -std::expm1(-2.0 * a);
    e = 1.0 - em;
    lg = std::log(em);
  } else {
    e = std::exp(-2.0 * a);
    em = 1.0 - e;
    lg = std::log1p(-e);
  }
  const double q = e / em;
  v = 2.0 * a * q - lg;
  dv = -4.0 * a * q / em;
}

// V''(a) = (2a coth a - 1) / sinh^2 a, only used as a curvature estimate.
inline double ddV_pos(double a) {
  if (a < kSeriesBranch) return 1.0 / (a * a) + 1.0 / 3.0;
  double e, em;
  if (a < 0.35) {
    em = -std::expm1(-2.0 * a);
    e = 1.0 - em;
  } else {
    e = std::exp(-2.0 * a);
    em = 1.0 - e;
  }
  return 4.0 * e * (2.0 * a * (1.0 + e) / em - 1.0) / (em * em);
}

}  // namespace detail

/// V(r). Throws std::domain_error for r == 0 or NaN. Even in r, bit-exactly.
double eval_V(double r);

/// V'(r) = -r / sinh^2 r. Throws std::domain_error for r == 0 or NaN.
double eval_dV(double r);

/// Integral of V over (0, inf); equals pi^2/6.
double integral_V();

/// Sum_{k>=1} V(k t) for t > 0.
double sum_V_multiples(double t);

/// Sum_{k>=1} k V'(k t) for t > 0, the t-derivative of sum_V_multiples.
double sum_k_dV_multiples(double t);

/// Smallest r (to bisection accuracy) with V(r) <= threshold; V is
/// decreasing on (0, inf) so every larger distance is below threshold too.
double cutoff_distance(double threshold);

}  // namespace pileup::potential
