#include "doctest.h"
#include "oracles.hpp"
#include "pileup/continuum.hpp"
#include "pileup/measures.hpp"
#include "pileup/potential.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace pileup;
using continuum::LimitConstants;
using measures::GridDensity;
using measures::QuantileFn;

namespace {

constexpr double kPi = std::numbers::pi;
const double kFourPi2Over9 = 4.0 * kPi * kPi / 9.0;

QuantileFn quantile_of(int m, double (*xi)(double)) {
  QuantileFn q;
  for (int i = 0; i < m; ++i) q.values.push_back(xi(QuantileFn::node(i, m)));
  return q;
}

// Cell masses of a density on [0, width] by Simpson's rule per cell.
template <class F>
GridDensity grid_of(int m, double width, F rho) {
  GridDensity g{width, {}};
  const double h = width / m;
  for (int i = 0; i < m; ++i) {
    const double a = i * h;
    g.weights.push_back(h / 6.0 * (rho(a) + 4.0 * rho(a + 0.5 * h) + rho(a + h)));
  }
  return g;
}

LimitConstants with_C(double C) {
  LimitConstants k;
  k.Lambda = 1.0;
  k.C = C;
  return k;
}

}  // namespace

TEST_SUITE("continuum") {

TEST_CASE("p = 3, q = 2: density 2(1 - x) has energy 4 pi^2 / 9") {
  // int V * int rho^2 + C int x rho = (pi^2/6)(4/3) + (2 pi^2/3)(1/3)
  const LimitConstants k = with_C(2.0 * kPi * kPi / 3.0);
  const auto rho = grid_of(400, 1.0, [](double x) { return 2.0 * (1.0 - x); });
  CHECK(continuum::limit_energy(3, 2, k, rho) == doctest::Approx(kFourPi2Over9).epsilon(1e-5));
  double prev_err = 1.0;
  for (int m : {100, 200, 400}) {
    // The exact quantile is convex at s = 0, so its linear extrapolation there
    // dips below 0 by O(1/m^2); shift by that order to make it feasible.
    auto xi = quantile_of(m, [](double s) { return 1.0 - std::sqrt(1.0 - s); });
    for (double& v : xi.values) v += 1.0 / (double(m) * m);
    const double err = std::fabs(continuum::limit_energy(3, 2, k, xi) - kFourPi2Over9);
    CHECK(err < 2.0 / m);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("p = 3, q = 2 minimizer recovers 2(1 - x)") {
  const LimitConstants k = with_C(2.0 * kPi * kPi / 3.0);
  double prev_linf = 1e9;
  for (int m : {200, 400}) {
    const auto rep = continuum::minimize_limit(3, 2, k, m);
    REQUIRE(rep.converged);
    CHECK(rep.objective == doctest::Approx(kFourPi2Over9).epsilon(1e-3 / kFourPi2Over9));
    const auto rho = measures::density_from_quantile(QuantileFn{rep.minimizer}, m);
    double linf = 0.0;
    for (int i = 0; i < rho.m(); ++i) {
      const double x = (i + 0.5) * rho.cell_width();
      linf = std::max(linf, std::fabs(rho.density(i) - 2.0 * (1.0 - x)));
    }
    CAPTURE(m);
    CHECK(linf < 20.0 / m);
    CHECK(linf < prev_linf);
    prev_linf = linf;
  }
}

TEST_CASE("p = 4, q = 2 objective stabilises under refinement") {
  const double ah = std::log(std::sqrt(kPi)) + 1.0;
  LimitConstants k;
  k.c_tilde = kPi;
  k.Lambda = kPi / ah;
  k.C = *k.Lambda * *k.Lambda;
  std::vector<double> e;
  for (int m : {200, 400, 800, 1600}) {
    const auto rep = continuum::minimize_limit(4, 2, k, m);
    REQUIRE(rep.converged);
    e.push_back(rep.objective);
  }
  // The grid minimum approaches its limit monotonically with shrinking
  // increments (here from below).
  for (std::size_t i = 2; i < e.size(); ++i) {
    CHECK((e[i] - e[i - 1]) * (e[i - 1] - e[i - 2]) > 0.0);
    CHECK(std::fabs(e[i] - e[i - 1]) < 0.5 * std::fabs(e[i - 1] - e[i - 2]));
  }
  CHECK(std::fabs(e[3] - e[2]) / e[3] < 5e-5);
}

TEST_CASE("p = 1: uniform density on [0, b] has interaction (3/2 - log b) / 2") {
  for (double b : {0.5, 1.0, 3.0}) {
    const double expected = 0.5 * (1.5 - std::log(b)) + 0.5 * b;
    LimitConstants k;
    const auto rho = grid_of(800, b, [b](double) { return 1.0 / b; });
    CHECK(continuum::limit_energy(1, 0, k, rho) == doctest::Approx(expected).epsilon(1e-4));
    QuantileFn xi;
    for (int i = 0; i < 800; ++i) xi.values.push_back(b * QuantileFn::node(i, 800));
    CHECK(continuum::limit_energy(1, 0, k, xi) == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("p = 2: uniform density against an independent quadrature") {
  for (double c : {0.5, 2.0, 8.0}) {
    boost::math::quadrature::tanh_sinh<double> ts;
    // (c/2) int int V(c|x - y|) over the unit square = c int_0^1 (1 - u) V(c u) du
    const double inter = c * ts.integrate([c](double u) { return (1.0 - u) * oracle::V(c * u); }, 0.0, 1.0);
    LimitConstants k;
    k.c_tilde = c;
    QuantileFn xi;
    for (int i = 0; i < 1000; ++i) xi.values.push_back(QuantileFn::node(i, 1000));
    const auto parts = continuum::limit_energy_parts(2, 0, k, xi);
    CAPTURE(c);
    CHECK(parts.interaction == doctest::Approx(inter).epsilon(1e-3));
  }
}

TEST_CASE("p = 4: uniform slope gives c S(c)") {
  for (double c : {0.3, 1.0, 4.0}) {
    LimitConstants k;
    k.c_tilde = c;
    QuantileFn xi;
    for (int i = 0; i < 64; ++i) xi.values.push_back(QuantileFn::node(i, 64));
    const auto parts = continuum::limit_energy_parts(4, 0, k, xi);
    CHECK(parts.interaction == doctest::Approx(c * oracle::sum_V(c, 100000)).epsilon(1e-10));
  }
}

TEST_CASE("p = 5 energy and its indicator") {
  LimitConstants k;
  k.Lambda = 1.0;
  k.beta = 1.0;
  QuantileFn id;
  for (int i = 0; i < 50; ++i) id.values.push_back(QuantileFn::node(i, 50));
  CHECK(continuum::limit_energy(5, 2, k, id) == doctest::Approx(2.0 * std::exp(-2.0) + 0.5).epsilon(1e-12));
  CHECK(continuum::limit_energy(5, 2, k, id) == doctest::Approx(0.770671).epsilon(1e-6));

  LimitConstants k3;
  CHECK(continuum::limit_energy(5, 3, k3, id) == doctest::Approx(2.0 * std::exp(-2.0)));
  auto flat = id;
  flat.values[20] = flat.values[21] - 0.5 / 50;  // slope 1/2 on one gap
  CHECK(std::isinf(continuum::limit_energy(5, 3, k3, flat)));
  auto shifted = id;
  for (double& v : shifted.values) v += 1e-3;  // support runs past 1
  CHECK(std::isinf(continuum::limit_energy(5, 3, k3, shifted)));
  auto left = id;
  for (double& v : left.values) v -= 1e-3;  // starts below 0
  CHECK(std::isinf(continuum::limit_energy(5, 3, k3, left)));
}

TEST_CASE("particular-case energy") {
  QuantileFn id, half, stretched;
  for (int i = 0; i < 40; ++i) {
    const double s = QuantileFn::node(i, 40);
    id.values.push_back(s);
    half.values.push_back(0.5 * s);
    stretched.values.push_back(2.0 * s);
  }
  CHECK(continuum::particular_case_energy(1.0, id) == doctest::Approx(0.5));
  CHECK(std::isinf(continuum::particular_case_energy(1.0, half)));
  CHECK(continuum::particular_case_energy(2.0, stretched) == doctest::Approx(1.0));
  CHECK(std::isinf(continuum::particular_case_energy(1.5, stretched)));
  const auto rep = continuum::minimize_particular_case(1.3, 32);
  for (int i = 0; i < 32; ++i) CHECK(rep.minimizer[i] == doctest::Approx(QuantileFn::node(i, 32)));
}

TEST_CASE("log-limit energy") {
  GridDensity packed{1.0, std::vector<double>(10, 0.0)};
  for (int i = 0; i < 5; ++i) packed.weights[i] = 0.2;
  CHECK(continuum::log_limit_energy(packed) == doctest::Approx(0.5));
  CHECK(continuum::log_limit_energy(GridDensity{1.0, std::vector<double>(8, 0.125)}) == doctest::Approx(0.0).scale(1.0));
  CHECK(std::isinf(continuum::log_limit_energy(GridDensity{2.0, std::vector<double>(4, 0.25)})));
  CHECK(std::isinf(continuum::log_limit_energy(measures::EmpiricalMeasure{{0.2, 0.5, 1.2}})));
  std::vector<double> atoms;
  for (int i = 1; i <= 100; ++i) atoms.push_back(0.5 * i / 100.0);
  CHECK(continuum::log_limit_energy(measures::EmpiricalMeasure{atoms}) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("force part is the force coefficient times the mean") {
  std::mt19937_64 rng(53);
  const auto v = oracle::random_increasing(30, 0.9, rng);
  const QuantileFn xi{v};
  double mean = 0.0;
  for (double x : v) mean += x / 30.0;
  LimitConstants k;
  k.c_tilde = 1.5;
  k.Lambda = 1.2;
  k.C = 1.44;
  for (int p = 1; p <= 4; ++p) {
    const auto parts = continuum::limit_energy_parts(p, 2, k, xi);
    CHECK(parts.force == doctest::Approx(continuum::force_coefficient(p, 2, k) * mean));
  }
  CHECK(continuum::force_coefficient(3, 3, k) == 0.0);
  CHECK(continuum::force_coefficient(3, 1, k) == 1.0);
  CHECK(continuum::force_coefficient(3, 2, k) == 1.44);
}

TEST_CASE("discretized energies are strictly convex along random chords") {
  std::mt19937_64 rng(59);
  LimitConstants k;
  k.c_tilde = 2.0;
  for (int p = 1; p <= 4; ++p)
    for (int trial = 0; trial < 20; ++trial) {
      // shifted right so the extrapolation to s = 0 stays non-negative
      auto a = oracle::random_increasing(24, 0.9, rng);
      auto b = oracle::random_increasing(24, 0.9, rng);
      for (int i = 0; i < 24; ++i) {
        a[i] += 0.05;
        b[i] += 0.05;
      }
      std::vector<double> mid(24);
      for (int i = 0; i < 24; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      const double ea = continuum::limit_energy(p, 0, k, QuantileFn{a});
      const double eb = continuum::limit_energy(p, 0, k, QuantileFn{b});
      CAPTURE(p);
      CHECK(continuum::limit_energy(p, 0, k, QuantileFn{mid}) < 0.5 * (ea + eb));
    }
}

TEST_CASE("quantile objective gradient matches central differences") {
  std::mt19937_64 rng(61);
  LimitConstants k;
  k.c_tilde = 2.0;
  k.Lambda = 1.0;
  k.C = 1.3;
  for (int p = 1; p <= 4; ++p) {
    const continuum::QuantileEnergy f(p, 2, k, 20);
    auto x = oracle::random_increasing(20, 0.9, rng);
    for (double& v : x) v += 0.03;
    std::vector<double> g(20);
    f.value_and_gradient(x, g);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    for (int i = 0; i < 20; ++i) {
      auto xp = x, xm = x;
      const double h = 1e-7;
      xp[i] += h;
      xm[i] -= h;
      CAPTURE(p);
      CHECK((f.value(xp) - f.value(xm)) / (2 * h) == doctest::Approx(g[i]).scale(gmax).epsilon(1e-6));
    }
  }
}

TEST_CASE("gap curvature is exact for p = 3 and p = 4") {
  std::mt19937_64 rng(67);
  LimitConstants k;
  k.c_tilde = 2.0;
  for (int p : {3, 4}) {
    const continuum::QuantileEnergy f(p, 0, k, 12);
    auto x = oracle::random_increasing(12, 0.9, rng);
    for (double& v : x) v += 0.05;
    std::vector<double> curv(12);
    REQUIRE(f.gap_curvature(x, curv));
    const double f0 = f.value(x);
    for (int j = 1; j < 12; ++j) {
      auto xp = x, xm = x;
      const double h = 1e-5;
      for (int i = j; i < 12; ++i) {
        xp[i] += h;
        xm[i] -= h;
      }
      CAPTURE(p);
      CAPTURE(j);
      CHECK(curv[j] == doctest::Approx((f.value(xp) - 2 * f0 + f.value(xm)) / (h * h)).epsilon(1e-4));
    }
  }
}

TEST_CASE("missing constants are rejected") {
  CHECK_THROWS_AS(continuum::validate(2, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(continuum::validate(4, 1, {}), std::invalid_argument);
  LimitConstants inf_beta;
  inf_beta.Lambda = 1.0;
  inf_beta.beta = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(continuum::validate(5, 2, inf_beta), scaling::ParticularCaseError);
  CHECK_NOTHROW(continuum::validate(3, 0, {}));
}

}
