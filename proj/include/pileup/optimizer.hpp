// Spectral projected gradient on the ordered box
//   { 0 <= x_1 <= ... <= x_n <= upper }
// with a Barzilai-Borwein step and Armijo backtracking.
//
// Iterates live in gap coordinates z_1 = x_1, z_k = x_k - x_{k-1}, where the
// ordering becomes z >= 0 and the box becomes a single half-space; the
// projection there is exact (breakpoint sweep on the multiplier). An
// objective may supply the Hessian diagonal in these coordinates, which is
// then used as a variable metric. The stopping test is the position-space
// residual ||x - P(x - grad)|| with P the Euclidean projection
// (pool-adjacent-violators followed by clamping).

#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pileup/discrete_energy.hpp"

namespace pileup::opt {

class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  // +inf outside the effective domain.
  virtual double value(std::span<const double> x) const = 0;
  // Only called where value() is finite.
  virtual double value_and_gradient(std::span<const double> x, std::span<double> grad) const = 0;
  // Optional curvature along each gap coordinate (curv[0] for x_1 itself).
  // Returning false selects the identity metric.
  virtual bool gap_curvature(std::span<const double> /*x*/, std::span<double> /*curv*/) const {
    return false;
  }
};

struct SolverOptions {
  double tolerance = 1e-9;  // stop when ||x - P(x - g)|| <= tolerance * (1 + |E|)
  int max_iterations = 100000;
  double min_gap = 1e-14;  // trial points with a smaller gap are rejected
  bool gap_to_origin = false;  // also guard x_1 - 0 (pinned wall)
  double armijo = 1e-4;
};

struct SolveReport {
  std::vector<double> minimizer;
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool zero_gradient_at_init = false;
  std::string message;
};

// Euclidean projection onto the ordered box. Throws std::domain_error if upper <= 0.
std::vector<double> project_ordered_box(std::span<const double> x, double upper);

// Generic driver. `init` is projected first.
SolveReport minimize(const Objective& f, std::vector<double> init, double upper,
                     const SolverOptions& options = {});

// E_n^{(p,q)} as an Objective over x_1..x_n.
class DiscreteObjective : public Objective {
 public:
  DiscreteObjective(energy::RegimeContext ctx, int n) : ctx_(ctx), n_(n) {}
  std::size_t dimension() const override { return static_cast<std::size_t>(n_); }
  double value(std::span<const double> x) const override;
  double value_and_gradient(std::span<const double> x, std::span<double> grad) const override;
  bool gap_curvature(std::span<const double> x, std::span<double> curv) const override;

 private:
  energy::RegimeContext ctx_;
  int n_;
};

// x_i = i * min(1, barrier) / (n + 1).
std::vector<double> default_initial(const energy::RegimeContext& ctx, int n);

SolveReport minimize_discrete(const energy::RegimeContext& ctx, int n,
                              std::optional<std::vector<double>> init = std::nullopt,
                              SolverOptions options = {});

// Minimizes over non-decreasing grid values xi_1..xi_m whose linear
// extrapolations to the ends of [0, 1] lie in [0, upper]:
// (3 xi_1 - xi_2) / 2 >= 0 and (3 xi_m - xi_{m-1}) / 2 <= upper. With
// min_slope c > 0 also m (xi_{i+1} - xi_i) >= c.
SolveReport minimize_quantile(const Objective& f, int m, double upper,
                              const SolverOptions& options = {},
                              std::optional<std::vector<double>> init = std::nullopt,
                              double min_slope = 0.0);

}  // namespace pileup::opt
