#include "pileup/potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <limits>
#include <stdexcept>

namespace pileup::potential {

namespace {

void check_argument(double r, const char* who) {
  if (std::isnan(r)) {
    throw std::domain_error(std::string(who) + ": NaN argument");
  }
  if (r == 0.0) {
    throw std::domain_error(std::string(who) + ": singular argument r = 0");
  }
}

// Tail control for the lattice sums: stop once the leading-order bound
// 2kt e^{-2kt} (inflated by 1.2) drops below this. The bound is only a
// tail bound past the maximum of r e^{-2r}, hence the kt >= 1 guard.
constexpr double kTailTolerance = 1e-16;

bool tail_negligible(double r) {
  return r >= 1.0 && 2.0 * r * std::exp(-2.0 * r) * 1.2 < kTailTolerance;
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

double eval_V(double r) {
  check_argument(r, "eval_V");
  const double a = std::fabs(r);
  if (std::isinf(a)) return 0.0;
  return detail::V_pos(a);
}

double eval_dV(double r) {
  check_argument(r, "eval_dV");
  const double a = std::fabs(r);
  if (std::isinf(a)) return 0.0;
  const double d = detail::dV_pos(a);
  return r > 0.0 ? d : -d;
}

double integral_V() {
  static const double value = [] {
    using boost::math::quadrature::gauss_kronrod;
    // On (0, 1] split off the logarithmic singularity: V(r) = -log r + g(r)
    // with g smooth, and the -log r part integrates to exactly 1.
    auto regular = [](double r) { return detail::V_pos(r) + std::log(r); };
    double err = 0.0;
    const double head =
        1.0 + gauss_kronrod<double, 31>::integrate(regular, 0.0, 1.0, 15, 1e-14, &err);
    // V(40) ~ 1e-33, beyond that the tail is below double resolution.
    auto smooth = [](double r) { return detail::V_pos(r); };
    const double tail =
        gauss_kronrod<double, 31>::integrate(smooth, 1.0, 40.0, 15, 1e-14, &err);
    return head + tail;
  }();
  return value;
}

double sum_V_multiples(double t) {
  if (!(t > 0.0)) {
    throw std::domain_error("sum_V_multiples: t must be positive (series diverges)");
  }
  if (std::isinf(t)) return 0.0;
  CompensatedSum acc;
  for (long k = 1;; ++k) {
    const double r = static_cast<double>(k) * t;
    acc.add(detail::V_pos(r));
    if (tail_negligible(r)) break;
  }
  return acc.value();
}

double sum_k_dV_multiples(double t) {
  if (!(t > 0.0)) {
    throw std::domain_error("sum_k_dV_multiples: t must be positive");
  }
  if (std::isinf(t)) return 0.0;
  CompensatedSum acc;
  for (long k = 1;; ++k) {
    const double kd = static_cast<double>(k);
    const double r = kd * t;
    acc.add(kd * detail::dV_pos(r));
    // |k V'(kt)| ~ 4 k r e^{-2r}; same tail rule, one extra factor of 2k.
    if (r >= 1.0 && 4.0 * kd * r * std::exp(-2.0 * r) * 1.2 < kTailTolerance) break;
  }
  return acc.value();
}

double cutoff_distance(double threshold) {
  if (!(threshold > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  // V(lo) > threshold >= V(hi)
  double lo = 1e-300;
  double hi = 1.0;
  while (detail::V_pos(hi) > threshold) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  if (detail::V_pos(lo) <= threshold) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::V_pos(mid) > threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace pileup::potential
