#include "pileup/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pileup::measures {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral over [a, b] of |u| for u linear with end values ua, ub.
double abs_linear_integral(double ua, double ub, double len) {
  if (ua * ub >= 0.0) return 0.5 * (std::fabs(ua) + std::fabs(ub)) * len;
  return 0.5 * (ua * ua + ub * ub) / (std::fabs(ua) + std::fabs(ub)) * len;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MonotoneCurve::MonotoneCurve(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.empty() || x_.size() != y_.size()) {
    throw std::invalid_argument("MonotoneCurve: need matching, non-empty coordinates");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (x_[i] < x_[i - 1] || y_[i] < y_[i - 1]) {
      throw std::invalid_argument("MonotoneCurve: coordinates must be non-decreasing");
    }
  }
}

double MonotoneCurve::operator()(double t) const {
  const auto it = std::lower_bound(x_.begin(), x_.end(), t);
  if (it == x_.end()) return y_.back();
  const std::size_t k = static_cast<std::size_t>(it - x_.begin());
  if (x_[k] == t || k == 0) return y_[k];
  const double w = (t - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return y_[k - 1] + w * (y_[k] - y_[k - 1]);
}

double MonotoneCurve::right_limit(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  if (it == x_.begin()) return y_.front();
  if (it == x_.end()) return y_.back();
  const std::size_t k = static_cast<std::size_t>(it - x_.begin());
  const double w = (t - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return y_[k - 1] + w * (y_[k] - y_[k - 1]);
}

MonotoneCurve pseudo_inverse(const MonotoneCurve& f) { return MonotoneCurve(f.y(), f.x()); }

MonotoneCurve quantile_curve(const EmpiricalMeasure& mu) {
  const std::size_t n = mu.atoms.size();
  if (n == 0) throw std::invalid_argument("quantile_curve: empty measure");
  std::vector<double> s, v;
  s.reserve(2 * n);
  v.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(static_cast<double>(i) / n);
    v.push_back(mu.atoms[i]);
    s.push_back(static_cast<double>(i + 1) / n);
    v.push_back(mu.atoms[i]);
  }
  return MonotoneCurve(std::move(s), std::move(v));
}

MonotoneCurve cdf_curve(const EmpiricalMeasure& mu) {
  const std::size_t n = mu.atoms.size();
  if (n == 0) throw std::invalid_argument("cdf_curve: empty measure");
  std::vector<double> x{0.0}, c{0.0};
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(mu.atoms[i]);
    c.push_back(static_cast<double>(i) / n);
    x.push_back(mu.atoms[i]);
    c.push_back(static_cast<double>(i + 1) / n);
  }
  return MonotoneCurve(std::move(x), std::move(c));
}

MonotoneCurve cdf_curve(const GridDensity& rho) {
  const int m = rho.m();
  if (m == 0) throw std::invalid_argument("cdf_curve: empty grid");
  const double h = rho.cell_width();
  std::vector<double> x(m + 1), c(m + 1);
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    x[i] = i * h;
    c[i] = acc;
    if (i < m) acc += rho.weights[i];
  }
  c[m] = 1.0;
  // Guard the running sum against tiny non-monotone rounding at the top.
  for (int i = m - 1; i >= 0; --i) c[i] = std::min(c[i], c[i + 1]);
  return MonotoneCurve(std::move(x), std::move(c));
}

MonotoneCurve quantile_curve(const GridDensity& rho) { return pseudo_inverse(cdf_curve(rho)); }

MonotoneCurve quantile_curve(const QuantileFn& xi) {
  const int m = xi.m();
  if (m == 0) throw std::invalid_argument("quantile_curve: empty quantile");
  if (m == 1) return MonotoneCurve({0.0, 1.0}, {xi.values[0], xi.values[0]});
  std::vector<double> s(m + 2), v(m + 2);
  s[0] = 0.0;
  v[0] = std::max(0.0, xi.values[0] - 0.5 * (xi.values[1] - xi.values[0]));
  for (int i = 0; i < m; ++i) {
    s[i + 1] = QuantileFn::node(i, m);
    v[i + 1] = xi.values[i];
  }
  s[m + 1] = 1.0;
  v[m + 1] = xi.values[m - 1] + 0.5 * (xi.values[m - 1] - xi.values[m - 2]);
  return MonotoneCurve(std::move(s), std::move(v));
}

MonotoneCurve to_quantile(std::span<const double> positions) {
  const std::size_t n = positions.size();
  if (n == 0) throw std::invalid_argument("to_quantile: empty configuration");
  std::vector<double> s(n + 1), v(n + 1);
  s[0] = 0.0;
  v[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    s[i] = static_cast<double>(i) / n;
    v[i] = positions[i - 1];
  }
  s[n] = 1.0;
  return MonotoneCurve(std::move(s), std::move(v));
}

QuantileFn sample(const MonotoneCurve& xi, int m) {
  QuantileFn out;
  out.values.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.values[i] = xi(QuantileFn::node(i, m));
  return out;
}

EmpiricalMeasure empirical(std::span<const double> positions) {
  EmpiricalMeasure mu{std::vector<double>(positions.begin(), positions.end())};
  std::sort(mu.atoms.begin(), mu.atoms.end());
  return mu;
}

double w1_distance(const MonotoneCurve& a, const MonotoneCurve& b) {
  std::vector<double> cuts{0.0, 1.0};
  for (double t : a.x()) {
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  }
  for (double t : b.x()) {
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double ua = a.right_limit(lo) - b.right_limit(lo);
    const double ub = a(hi) - b(hi);
    total += abs_linear_integral(ua, ub, hi - lo);
  }
  return total;
}

double max_density_ratio(const GridDensity& rho) {
  double best = 0.0;
  for (int i = 0; i < rho.m(); ++i) best = std::max(best, rho.density(i));
  return best;
}

double max_density_ratio(const EmpiricalMeasure& mu) {
  const std::size_t n = mu.atoms.size();
  const auto& x = mu.atoms;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = x[j] - x[i];
      if (!(gap > 0.0)) return kInf;
      best = std::max(best, static_cast<double>(j - i) / (static_cast<double>(n) * gap));
    }
  }
  return best;
}

GridDensity density_from_quantile(const QuantileFn& xi, int m_out) {
  if (m_out < 1) throw std::invalid_argument("density_from_quantile: m_out must be >= 1");
  if (xi.m() < 2) throw std::domain_error("atomic part present");
  for (int i = 1; i < xi.m(); ++i) {
    if (xi.values[i] - xi.values[i - 1] <= 1e-12) throw std::domain_error("atomic part present");
  }
  const MonotoneCurve q = quantile_curve(xi);
  const MonotoneCurve cdf = pseudo_inverse(q);
  GridDensity rho;
  rho.width = q.y().back();
  rho.weights.resize(static_cast<std::size_t>(m_out));
  const double h = rho.width / m_out;
  double prev = cdf(0.0);
  double mass = 0.0;
  for (int i = 0; i < m_out; ++i) {
    const double next = i + 1 == m_out ? cdf.right_limit(rho.width) : cdf((i + 1) * h);
    rho.weights[i] = next - prev;
    mass += rho.weights[i];
    prev = next;
  }
  for (double& w : rho.weights) w /= mass;
  return rho;
}

void write_csv(std::ostream& os, const EmpiricalMeasure& mu) {
  const std::size_t n = mu.atoms.size();
  os << "# empirical n=" << n << "\n";
  os << "position,weight\n";
  const std::string w = fmt17(1.0 / static_cast<double>(n));
  for (double x : mu.atoms) os << fmt17(x) << ',' << w << '\n';
}

void write_csv(std::ostream& os, const GridDensity& rho) {
  os << "# grid m=" << rho.m() << " width=" << fmt17(rho.width) << "\n";
  os << "position,weight\n";
  const double h = rho.cell_width();
  for (int i = 0; i < rho.m(); ++i) {
    os << fmt17((i + 0.5) * h) << ',' << fmt17(rho.weights[i]) << '\n';
  }
}

AnyMeasure read_csv(std::istream& is) {
  std::string line;
  bool grid = false;
  bool seen_header = false;
  double width = 0.0;
  long declared = -1;
  std::vector<double> pos, wt;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string kind, field;
      hs >> kind;
      if (kind == "empirical" || kind == "grid") {
        grid = kind == "grid";
        seen_header = true;
        while (hs >> field) {
          const auto eq = field.find('=');
          if (eq == std::string::npos) continue;
          const std::string key = field.substr(0, eq);
          const std::string val = field.substr(eq + 1);
          if (key == "n" || key == "m") declared = std::stol(val);
          if (key == "width") width = std::stod(val);
        }
      }
      continue;
    }
    if (line.rfind("position", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("measure csv: malformed row");
    pos.push_back(std::stod(line.substr(0, comma)));
    wt.push_back(std::stod(line.substr(comma + 1)));
  }
  if (!seen_header) throw std::invalid_argument("measure csv: missing '# empirical' or '# grid' header");
  if (declared >= 0 && static_cast<std::size_t>(declared) != pos.size()) {
    throw std::invalid_argument("measure csv: row count does not match header");
  }
  if (grid) {
    if (!(width > 0.0)) throw std::invalid_argument("measure csv: grid width must be positive");
    return GridDensity{width, std::move(wt)};
  }
  return EmpiricalMeasure{std::move(pos)};
}

}  // namespace pileup::measures
