#include "doctest.h"
#include "oracles.hpp"
#include "pileup/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

using namespace pileup::measures;

namespace {

// W1 as the integral of |F_mu - F_nu| over x, by a fine midpoint rule on
// the CDF curves; independent of the quantile route used by the library.
double w1_by_cdf(const MonotoneCurve& F, const MonotoneCurve& G, double xmax) {
  const int steps = 400000;
  const double h = xmax / steps;
  double s = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = (i + 0.5) * h;
    s += std::fabs(F(x) - G(x));
  }
  return s * h;
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("W1 examples") {
  CHECK(w1_distance(EmpiricalMeasure{{0.0}}, EmpiricalMeasure{{1.0}}) == doctest::Approx(1.0));
  CHECK(w1_distance(GridDensity{1.0, std::vector<double>(10, 0.1)}, EmpiricalMeasure{{0.0}}) ==
        doctest::Approx(0.5));
  const EmpiricalMeasure mu{{0.1, 0.4, 0.4, 0.9}};
  CHECK(w1_distance(mu, mu) == 0.0);
}

TEST_CASE("W1 between empirical measures is the mean sorted displacement") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(25), b(25);
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ref = 0.0;
    for (int i = 0; i < 25; ++i) ref += std::fabs(a[i] - b[i]) / 25.0;
    CHECK(w1_distance(EmpiricalMeasure{a}, EmpiricalMeasure{b}) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("W1 agrees with the CDF formula for mixed representations") {
  const GridDensity rho{1.5, {0.1, 0.3, 0.2, 0.4}};
  const EmpiricalMeasure mu{{0.05, 0.3, 0.8, 1.0, 1.2}};
  const double ref = w1_by_cdf(cdf_curve(rho), cdf_curve(mu), 2.0);
  CHECK(w1_distance(rho, mu) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("pseudo-inverse") {
  const MonotoneCurve f({0.0, 1.0}, {1.0, 3.0});
  const MonotoneCurve g = pseudo_inverse(f);
  for (double y : {1.0, 1.5, 2.2, 3.0}) CHECK(g(y) == doctest::Approx((y - 1.0) / 2.0));
  // a jump of f becomes a flat piece of the inverse and vice versa
  const MonotoneCurve j({0.0, 0.5, 0.5, 1.0}, {0.0, 0.2, 0.8, 1.0});
  const MonotoneCurve ji = pseudo_inverse(j);
  CHECK(ji(0.3) == doctest::Approx(0.5));
  CHECK(ji(0.7) == doctest::Approx(0.5));
  CHECK(ji(0.1) == doctest::Approx(0.25));
  const MonotoneCurve back = pseudo_inverse(ji);
  for (double t : {0.1, 0.3, 0.7, 0.9}) CHECK(back(t) == doctest::Approx(j(t)));
}

TEST_CASE("CDF and quantile curves are pseudo-inverses") {
  const GridDensity rho{2.0, {0.25, 0.0, 0.5, 0.25}};
  const MonotoneCurve q = quantile_curve(rho);
  const MonotoneCurve qi = pseudo_inverse(cdf_curve(rho));
  for (double s : {0.1, 0.25, 0.3, 0.6, 0.9}) CHECK(q(s) == doctest::Approx(qi(s)));
}

TEST_CASE("to_quantile interpolates positions") {
  const int n = 8;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = (i + 1.0) / n;
  const MonotoneCurve xi = to_quantile(x);
  for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) CHECK(xi(s) == doctest::Approx(s));
  const QuantileFn smp = sample(xi, 10);
  for (int i = 0; i < 10; ++i) CHECK(smp.values[i] == doctest::Approx(QuantileFn::node(i, 10)));
}

TEST_CASE("max density ratio") {
  GridDensity packed{1.0, std::vector<double>(10, 0.0)};
  for (int i = 0; i < 5; ++i) packed.weights[i] = 0.2;
  CHECK(max_density_ratio(packed) == doctest::Approx(2.0));
  std::vector<double> uni(50);
  for (int i = 0; i < 50; ++i) uni[i] = (i + 1.0) / 50;
  CHECK(max_density_ratio(EmpiricalMeasure{uni}) == doctest::Approx(1.0));
  CHECK(std::isinf(max_density_ratio(EmpiricalMeasure{{0.1, 0.3, 0.3, 0.6}})));

  std::mt19937_64 rng(73);
  const auto x = oracle::random_increasing(40, 1.0, rng);
  double ref = 0.0;
  for (int i = 0; i < 40; ++i)
    for (int j = i + 1; j < 40; ++j) ref = std::max(ref, ((j - i) / 40.0) / (x[j] - x[i]));
  CHECK(max_density_ratio(EmpiricalMeasure{x}) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("density from quantile") {
  QuantileFn id, twice, square;
  const int m = 400;
  for (int i = 0; i < m; ++i) {
    const double s = QuantileFn::node(i, m);
    id.values.push_back(s);
    twice.values.push_back(2.0 * s);
    square.values.push_back(s * s);
  }
  const GridDensity r1 = density_from_quantile(id, 20);
  CHECK(r1.width == doctest::Approx(1.0));
  for (int i = 0; i < 20; ++i) CHECK(r1.density(i) == doctest::Approx(1.0).epsilon(1e-9));
  const GridDensity r2 = density_from_quantile(twice, 20);
  CHECK(r2.width == doctest::Approx(2.0));
  for (int i = 0; i < 20; ++i) CHECK(r2.density(i) == doctest::Approx(0.5).epsilon(1e-9));

  // xi = s^2 has density 1/(2 sqrt x); exact cell averages (sqrt b - sqrt a)/(b - a)
  const GridDensity r3 = density_from_quantile(square, 50);
  const double h = r3.cell_width();
  for (int i = 5; i < 50; ++i) {
    const double a = i * h, b = (i + 1) * h;
    CHECK(r3.density(i) == doctest::Approx((std::sqrt(b) - std::sqrt(a)) / h).epsilon(5.0 / m));
  }

  QuantileFn flat = id;
  flat.values[10] = flat.values[9];
  CHECK_THROWS_WITH_AS(density_from_quantile(flat, 20), "atomic part present", std::domain_error);
}

TEST_CASE("CSV round trip is idempotent") {
  const EmpiricalMeasure mu{{0.1, 0.25, 1.0 / 3.0, 0.9}};
  const GridDensity rho{1.5, {0.1, 0.2, 0.3, 0.4}};
  for (int kind = 0; kind < 2; ++kind) {
    std::ostringstream first;
    if (kind == 0) write_csv(first, mu); else write_csv(first, rho);
    std::istringstream in(first.str());
    const AnyMeasure back = read_csv(in);
    std::ostringstream second;
    std::visit([&](const auto& m) { write_csv(second, m); }, back);
    CHECK(first.str() == second.str());
  }
  std::istringstream in_mu([&] {
    std::ostringstream o;
    write_csv(o, mu);
    return o.str();
  }());
  const auto back = std::get<EmpiricalMeasure>(read_csv(in_mu));
  CHECK(back.atoms == mu.atoms);
  std::istringstream bad("# grid m=2 width=1\n0.25,0.5\n");
  CHECK_THROWS(read_csv(bad));
}

}
