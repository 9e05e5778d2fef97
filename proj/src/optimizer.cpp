#include "pileup/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pileup::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kStepMin = 1e-30;
constexpr double kStepMax = 1e30;
constexpr int kMaxBacktracks = 60;
// Metric entries are floored at this fraction of the largest one.
constexpr double kMetricFloor = 1e-12;

// Unweighted isotonic regression (pool adjacent violators), then clamp.
// Clamping the isotonic fit to constant bounds gives the bounded fit.
std::vector<double> project_unchecked(std::span<const double> x, double upper) {
  const std::size_t n = x.size();
  std::vector<double> level;
  std::vector<std::size_t> count;
  level.reserve(n);
  count.reserve(n);
  for (double v : x) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t c2 = count.back();
      const double v2 = level.back();
      level.pop_back();
      count.pop_back();
      const double c1 = static_cast<double>(count.back());
      level.back() = (c1 * level.back() + static_cast<double>(c2) * v2) / (c1 + c2);
      count.back() += c2;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < level.size(); ++b) {
    const double v = std::clamp(level[b], 0.0, upper);
    out.insert(out.end(), count[b], v);
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Feasible set in working coordinates w, with positions x = B w:
//   x_1 = w_0 + head w_1,   x_k = x_{k-1} + w_{k-1} (k >= 2)
// so w_1.. are the gaps and w_0 is x_1 (head = 0) or, for head = 1/2, the
// linear extrapolation of the first two values one half step to the left.
// Constraints: w_k >= lower_k and top . x <= bound, i.e. top_w . w <= bound
// with top_w = B^T top.
struct Geometry {
  std::vector<double> lower;
  double head = 0.0;
  std::vector<double> top;      // position-space weights; empty: no constraint
  std::vector<double> top_w;
  double bound = kInf;
  std::size_t guard_from = 1;   // w_k with k >= guard_from must be >= min_gap

  bool has_top() const { return !top.empty() && std::isfinite(bound); }

  // Box bound on x_n only; the projection is then PAV plus a clamp.
  bool plain_box() const {
    if (!has_top()) return true;
    for (std::size_t i = 0; i + 1 < top.size(); ++i) {
      if (top[i] != 0.0) return false;
    }
    return top.back() == 1.0;
  }
};

std::vector<double> to_positions(std::span<const double> w, double head) {
  std::vector<double> x(w.size());
  if (w.empty()) return x;
  x[0] = w[0] + (w.size() > 1 ? head * w[1] : 0.0);
  for (std::size_t k = 1; k < w.size(); ++k) x[k] = x[k - 1] + w[k];
  return x;
}

std::vector<double> to_work(std::span<const double> x, double head) {
  std::vector<double> w(x.size());
  if (x.empty()) return w;
  for (std::size_t k = 1; k < x.size(); ++k) w[k] = x[k] - x[k - 1];
  w[0] = x[0] - (x.size() > 1 ? head * w[1] : 0.0);
  return w;
}

// out = B^T v
void pull_back(std::span<const double> v, double head, std::span<double> out) {
  double s = 0.0;
  for (std::size_t k = v.size(); k-- > 0;) {
    s += v[k];
    out[k] = s;
  }
  if (v.size() > 1) out[1] += head * out[0];
}

Geometry make_geometry(std::vector<double> lower, double head, std::vector<double> top,
                       double bound, std::size_t guard_from) {
  Geometry g;
  g.lower = std::move(lower);
  g.head = head;
  g.bound = bound;
  g.guard_from = guard_from;
  if (std::isfinite(bound)) {
    g.top = std::move(top);
    g.top_w.assign(g.top.size(), 0.0);
    pull_back(g.top, head, g.top_w);
  }
  return g;
}

// Smallest root of the non-increasing function phi on [0, inf) (phi(0) > 0
// assumed), returned from the phi <= 0 side.
template <class Phi>
double bisect_multiplier(Phi phi) {
  double lo = 0.0, hi = 1.0;
  while (phi(hi) > 0.0 && hi < 1e300) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > 0.0) lo = mid; else hi = mid;
  }
  return hi;
}

// Euclidean projection in position space onto the feasible set. After the
// shift s = B lower, the set is {e ordered, (1+head) e_1 - head e_2 >= 0,
// top . e <= b'}. Each half-space that is not a plain clamp is handled by
// bisection on its multiplier (nested when both are active).
std::vector<double> project_positions(std::span<const double> y, const Geometry& geo) {
  const std::size_t n = y.size();
  const auto shift = to_positions(geo.lower, geo.head);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = y[i] - shift[i];
  const bool head_free = geo.head == 0.0 || n < 2;
  const double b = geo.has_top() ? geo.bound - dot(geo.top, shift) : kInf;

  std::vector<double> e;
  if (head_free && geo.plain_box()) {
    e = project_unchecked(v, std::max(b, 0.0));
  } else {
    std::vector<double> low(n, 0.0);
    if (!head_free) {
      low[0] = 1.0 + geo.head;
      low[1] = -geo.head;
    }
    std::vector<double> w(n);
    // e >= 0 is implied by the head constraint, so keeping the clamp at 0 in
    // the inner projection does not change the solution.
    auto at = [&](double mu_top, double mu_low) {
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = v[i] + mu_low * low[i] - (geo.has_top() ? mu_top * geo.top[i] : 0.0);
      }
      return project_unchecked(w, kInf);
    };
    auto inner = [&](double mu_top) {
      auto r = at(mu_top, 0.0);
      if (head_free || dot(low, r) >= 0.0) return r;
      return at(mu_top, bisect_multiplier([&](double mu) { return -dot(low, at(mu_top, mu)); }));
    };
    e = inner(0.0);
    if (geo.has_top() && dot(geo.top, e) > b) {
      e = inner(bisect_multiplier([&](double mu) { return dot(geo.top, inner(mu)) - b; }));
    }
  }
  for (std::size_t i = 0; i < n; ++i) e[i] += shift[i];
  return e;
}

double residual(std::span<const double> x, std::span<const double> g, const Geometry& geo) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - g[i];
  const auto p = project_positions(y, geo);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - p[i]) * (x[i] - p[i]);
  return std::sqrt(s);
}

// Projection of y onto {w >= lower, top_w . w <= bound} in the metric
// diag(D): the multiplier solves a piecewise-linear equation, swept over the
// sorted breakpoints.
void project_work(std::span<const double> y, std::span<const double> D, const Geometry& geo,
                  double bound, std::span<double> z) {
  const std::size_t n = y.size();
  for (std::size_t k = 0; k < n; ++k) z[k] = std::max(geo.lower[k], y[k]);
  if (!geo.has_top() || dot(geo.top_w, z) <= bound) return;

  const auto& a = geo.top_w;
  std::vector<std::pair<double, std::size_t>> bp;
  double A = 0.0, B = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] > 0.0 && y[k] > geo.lower[k]) {
      bp.emplace_back((y[k] - geo.lower[k]) * D[k] / a[k], k);
      A += a[k] * y[k];
      B += a[k] * a[k] / D[k];
    } else {
      A += a[k] * z[k];
    }
  }
  std::sort(bp.begin(), bp.end());
  double mu = 0.0;
  for (const auto& [mu_k, k] : bp) {
    if (A - mu_k * B <= bound) {
      mu = (A - bound) / B;
      break;
    }
    A += a[k] * (geo.lower[k] - y[k]);
    B -= a[k] * a[k] / D[k];
    mu = mu_k;
  }
  for (std::size_t k = 0; k < n; ++k) z[k] = std::max(geo.lower[k], y[k] - mu * a[k] / D[k]);
}

bool gaps_ok(std::span<const double> z, const Geometry& geo, double min_gap) {
  for (std::size_t k = geo.guard_from; k < z.size(); ++k) {
    if (!(z[k] >= min_gap)) return false;
  }
  return true;
}

void make_metric(const Objective& f, std::span<const double> x, std::span<double> D) {
  if (!f.gap_curvature(x, D)) {
    std::fill(D.begin(), D.end(), 1.0);
    return;
  }
  double dmax = 0.0;
  for (double d : D) {
    if (std::isfinite(d)) dmax = std::max(dmax, d);
  }
  if (!(dmax > 0.0)) {
    std::fill(D.begin(), D.end(), 1.0);
    return;
  }
  for (double& d : D) d = std::isfinite(d) ? std::max(d, kMetricFloor * dmax) : dmax;
}

// Spectral projected gradient in gap coordinates with a diagonal variable
// metric. Convergence is measured in position space.
SolveReport solve(const Objective& f, std::vector<double> init, const Geometry& geo,
                  const SolverOptions& o) {
  SolveReport rep;
  const std::size_t n = init.size();
  if (n != f.dimension()) throw std::invalid_argument("minimize: initial point has wrong size");
  std::vector<double> x = project_positions(init, geo);
  if (n == 0) {
    rep.objective = f.value(x);
    rep.kkt_residual = 0.0;
    rep.converged = true;
    rep.minimizer = x;
    return rep;
  }
  std::vector<double> z = to_work(x, geo.head);
  if (!gaps_ok(z, geo, o.min_gap)) {
    rep.minimizer = x;
    rep.message = "initial point violates the coincidence guard";
    return rep;
  }
  std::vector<double> g(n), gz(n), gt(n), gzt(n), zt(n), d(n), y(n), D(n);
  double fx = f.value_and_gradient(x, g);
  if (!std::isfinite(fx)) {
    rep.minimizer = x;
    rep.objective = fx;
    rep.message = "objective is not finite at the initial point";
    return rep;
  }
  rep.zero_gradient_at_init = std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
  pull_back(g, geo.head, gz);
  make_metric(f, x, D);

  double res = residual(x, g, geo);
  // Step that moves no coordinate by more than 1; also the fallback when the
  // curvature estimate s'y is not positive.
  auto safe_step = [&] {
    double gmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) gmax = std::max(gmax, std::fabs(gz[k]) / D[k]);
    return gmax > 0.0 ? std::clamp(std::min(1.0, 1.0 / gmax), kStepMin, kStepMax) : 1.0;
  };
  double lambda = safe_step();

  std::vector<double> xt;
  int it = 0;
  for (;; ++it) {
    if (res <= o.tolerance * (1.0 + std::fabs(fx))) {
      rep.converged = true;
      rep.message = "converged";
      break;
    }
    if (it >= o.max_iterations) {
      rep.message = "iteration cap reached";
      break;
    }
    for (std::size_t k = 0; k < n; ++k) y[k] = z[k] - lambda * gz[k] / D[k];
    // An iterate sitting on the half-space can overshoot it by a few ulps;
    // projecting onto a set that excludes it would make d point inward and
    // spoil descent, so the bound is relaxed to include the iterate.
    const double bound = geo.has_top() ? std::max(geo.bound, dot(geo.top_w, z)) : kInf;
    project_work(y, D, geo, bound, zt);
    for (std::size_t k = 0; k < n; ++k) d[k] = zt[k] - z[k];
    const double gd = dot(gz, d);
    if (!(gd < 0.0)) {
      // Only happens when the step collapsed numerically; shrink and retry.
      lambda = std::clamp(lambda * 0.5, kStepMin, kStepMax);
      if (lambda == kStepMin) {
        rep.message = "no descent direction";
        break;
      }
      continue;
    }

    double t = 1.0;
    bool accepted = false;
    bool have_grad = false;
    double ft = kInf;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
      for (std::size_t k = 0; k < n; ++k) zt[k] = z[k] + t * d[k];
      if (!gaps_ok(zt, geo, o.min_gap)) continue;
      if (geo.has_top() && dot(geo.top_w, zt) > bound + 1e-12 * (1.0 + std::fabs(bound))) continue;
      xt = to_positions(zt, geo.head);
      ft = f.value(xt);
      have_grad = false;
      if (bt == 0 && std::isfinite(ft)) {
        ft = f.value_and_gradient(xt, gt);
        have_grad = true;
      }
      if (!std::isfinite(ft)) continue;
      if (ft <= fx + o.armijo * t * gd) {
        accepted = true;
        break;
      }
      // Within roundoff of fx the Armijo test carries no information; fall
      // back to the projected-gradient residual.
      if (ft <= fx + 64.0 * kEps * std::fabs(fx)) {
        if (!have_grad) {
          ft = f.value_and_gradient(xt, gt);
          have_grad = true;
        }
        if (residual(xt, gt, geo) < res) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      rep.message = "line search failed";
      break;
    }
    if (!have_grad) ft = f.value_and_gradient(xt, gt);
    pull_back(gt, geo.head, gzt);
    make_metric(f, xt, D);

    double sDs = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = zt[k] - z[k];
      sDs += D[k] * s * s;
      sy += s * (gzt[k] - gz[k]);
    }
    z.swap(zt);
    x.swap(xt);
    g.swap(gt);
    gz.swap(gzt);
    fx = ft;
    lambda = sy > 0.0 ? std::clamp(sDs / sy, kStepMin, kStepMax) : safe_step();
    res = residual(x, g, geo);
  }
  rep.minimizer = std::move(x);
  rep.objective = fx;
  rep.iterations = it;
  rep.kkt_residual = res;
  return rep;
}

Geometry box_geometry(std::size_t n, double upper, bool gap_to_origin) {
  std::vector<double> top;
  if (n > 0) {
    top.assign(n, 0.0);
    top.back() = 1.0;
  }
  return make_geometry(std::vector<double>(n, 0.0), 0.0, std::move(top), upper,
                       gap_to_origin ? 0 : 1);
}

}  // namespace

std::vector<double> project_ordered_box(std::span<const double> x, double upper) {
  if (!(upper > 0.0)) throw std::domain_error("project_ordered_box: upper must be positive");
  return project_unchecked(x, upper);
}

SolveReport minimize(const Objective& f, std::vector<double> init, double upper,
                     const SolverOptions& options) {
  if (!(upper > 0.0)) throw std::domain_error("minimize: upper must be positive");
  const auto geo = box_geometry(init.size(), upper, options.gap_to_origin);
  return solve(f, std::move(init), geo, options);
}

double DiscreteObjective::value(std::span<const double> x) const {
  return energy::total_energy(ctx_, x);
}

double DiscreteObjective::value_and_gradient(std::span<const double> x,
                                             std::span<double> grad) const {
  return energy::total_gradient(ctx_, x, grad);
}

bool DiscreteObjective::gap_curvature(std::span<const double> x,
                                      std::span<double> curv) const {
  energy::interaction_gap_curvature(ctx_, x, curv);
  return true;
}

std::vector<double> default_initial(const energy::RegimeContext& ctx, int n) {
  const double width = std::min(1.0, energy::barrier_upper(ctx));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = (i + 1) * width / (n + 1);
  return x;
}

SolveReport minimize_discrete(const energy::RegimeContext& ctx, int n,
                              std::optional<std::vector<double>> init, SolverOptions options) {
  energy::validate(ctx);
  if (n < 1) throw std::invalid_argument("minimize_discrete: n must be >= 1");
  options.gap_to_origin = true;
  DiscreteObjective f(ctx, n);
  const auto geo = box_geometry(static_cast<std::size_t>(n), energy::barrier_upper(ctx), true);
  std::vector<double> x0 = init ? std::move(*init) : default_initial(ctx, n);
  SolveReport rep = solve(f, std::move(x0), geo, options);
  if (!rep.converged && init && rep.iterations == 0) {
    // Unusable warm start (e.g. touching the pinned wall); retry from default.
    rep = solve(f, default_initial(ctx, n), geo, options);
  }
  return rep;
}

SolveReport minimize_quantile(const Objective& f, int m, double upper,
                              const SolverOptions& options,
                              std::optional<std::vector<double>> init, double min_slope) {
  if (m < 1 || f.dimension() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("minimize_quantile: grid size mismatch");
  }
  if (!(upper > 0.0)) throw std::domain_error("minimize_quantile: upper must be positive");
  const std::size_t n = static_cast<std::size_t>(m);
  const double c = std::max(min_slope, 0.0);

  // w_0 is the extrapolated value at s = 0.
  std::vector<double> lower(n, c / m);
  lower[0] = m > 1 ? 0.0 : 0.5 * c;
  std::vector<double> top(n, 0.0);
  if (m == 1) {
    top[0] = 1.0;
  } else {
    top[n - 1] = 1.5;
    top[n - 2] = -0.5;
  }
  // sup of the extrapolated quantile at s = 1 for the uniform slope c is c.
  if (std::isfinite(upper) && upper < c) {
    SolveReport rep;
    rep.message = "empty feasible set";
    return rep;
  }
  SolverOptions o = options;
  if (c > 0.0) o.min_gap = -kInf;  // the slope bound already keeps gaps open
  const auto geo = make_geometry(std::move(lower), m > 1 ? 0.5 : 0.0, std::move(top), upper, 1);

  std::vector<double> x0;
  if (init) {
    x0 = std::move(*init);
  } else {
    // Uniform slope filling [0, min(1, upper)].
    x0.resize(n);
    const double w = std::min(1.0, upper);
    for (std::size_t i = 0; i < n; ++i) x0[i] = (i + 0.5) / m * std::max(w, c);
  }
  return solve(f, std::move(x0), geo, o);
}

}  // namespace pileup::opt
