// Probability measures on [0, inf) in three representations, and the
// conversions between them.
//
// Every measure can be turned into its quantile function, stored as a
// MonotoneCurve: a polyline through points with non-decreasing x and y.
// Two points with equal x form a jump, two with equal y a flat piece. The
// pseudo-inverse f^{-1}(y) = sup{x : f(x) < y} of such a curve is the same
// polyline with coordinates swapped.

#pragma once

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace pileup::measures {

// Uniform atoms of mass 1/n at sorted positions.
struct EmpiricalMeasure {
  std::vector<double> atoms;
};

// Quantile values xi(s_i) at the midpoints s_i = (i - 1/2) / m.
struct QuantileFn {
  std::vector<double> values;

  int m() const { return static_cast<int>(values.size()); }
  static double node(int i, int m) { return (i + 0.5) / m; }  // 0-based i
};

// Piecewise-constant density on [0, width]: cell i is [i h, (i + 1) h],
// h = width / m, holding mass weights[i].
struct GridDensity {
  double width = 1.0;
  std::vector<double> weights;

  int m() const { return static_cast<int>(weights.size()); }
  double cell_width() const { return width / static_cast<double>(weights.size()); }
  double density(int i) const { return weights[i] / cell_width(); }
};

class MonotoneCurve {
 public:
  MonotoneCurve() = default;
  MonotoneCurve(std::vector<double> x, std::vector<double> y);

  // Left-continuous: at a jump returns the lower value. Constant outside
  // [x.front(), x.back()].
  double operator()(double t) const;
  double right_limit(double t) const;

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_, y_;
};

MonotoneCurve pseudo_inverse(const MonotoneCurve& f);

// Quantile curves on (0, 1).
MonotoneCurve quantile_curve(const EmpiricalMeasure& mu);
MonotoneCurve quantile_curve(const GridDensity& rho);
// Linear through the midpoint samples, extended linearly to s = 0 and
// s = 1 (clamped at 0 on the left).
MonotoneCurve quantile_curve(const QuantileFn& xi);

// CDF x -> mu([0, x]) as a curve, for the duality checks.
MonotoneCurve cdf_curve(const EmpiricalMeasure& mu);
MonotoneCurve cdf_curve(const GridDensity& rho);

// xi_n(s): piecewise affine through (i/n, x_i), i = 0..n, x_0 = 0.
MonotoneCurve to_quantile(std::span<const double> positions);
QuantileFn sample(const MonotoneCurve& xi, int m);

EmpiricalMeasure empirical(std::span<const double> positions);

// Exact integral over (0, 1) of |xi_mu - xi_nu| for piecewise-linear curves.
double w1_distance(const MonotoneCurve& xi_mu, const MonotoneCurve& xi_nu);

template <class A, class B>
double w1_distance(const A& mu, const B& nu) {
  return w1_distance(quantile_curve(mu), quantile_curve(nu));
}

// sup_{a<b} mu((a,b)) / (b - a).
// Grid: the largest cell density. Empirical: max over atom pairs i < j of
// ((j - i) / n) / (x_j - x_i); +inf if two atoms coincide.
double max_density_ratio(const GridDensity& rho);
double max_density_ratio(const EmpiricalMeasure& mu);

// Density of the measure with quantile xi on m_out cells of [0, sup xi].
// Throws std::domain_error("atomic part present") on a flat piece of xi.
GridDensity density_from_quantile(const QuantileFn& xi, int m_out);

// CSV exchange: "# empirical n=<n>" or "# grid m=<m> width=<w>", then rows
// position,weight (cell midpoints for grids).
using AnyMeasure = std::variant<EmpiricalMeasure, GridDensity>;
void write_csv(std::ostream& os, const EmpiricalMeasure& mu);
void write_csv(std::ostream& os, const GridDensity& rho);
AnyMeasure read_csv(std::istream& is);

}  // namespace pileup::measures
