#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/periodic.hpp"

using namespace qpr;

namespace {

PeriodicFn sampled(const std::function<double(double)>& f, int n, int K) {
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(j)] = f(static_cast<double>(j) / n);
  return fit_periodic(vals, K);
}

}  // namespace

TEST_CASE("trigonometric fit reproduces the function") {
  const auto f = [](double t) {
    return 0.4 + 3.0 * std::cos(two_pi * t) + 4.0 * std::sin(two_pi * t) -
           0.7 * std::cos(2.0 * two_pi * t);
  };
  const PeriodicFn g = sampled(f, 64, 5);
  for (double t : {0.0, 0.13, 0.5, 0.77, 0.999}) CHECK(g.eval(t) == Catch::Approx(f(t)).margin(1e-12));
}

TEST_CASE("fit coefficients follow the analysis convention c_k = (u - i v)/2") {
  // u cos + v sin with u = 3, v = 4 on mode 1
  const auto f = [](double t) { return 3.0 * std::cos(two_pi * t) + 4.0 * std::sin(two_pi * t); };
  const PeriodicFn g = sampled(f, 64, 3);
  const int K = (static_cast<int>(g.coeffs.size()) - 1) / 2;
  const cplx c1 = g.coeffs[static_cast<std::size_t>(K + 1)];
  CHECK(std::abs(c1 - cplx(1.5, -2.0)) < 1e-13);
  // direct quadrature agrees
  const cplx q1 = oracle::fourier_coeff_direct(f, 1);
  CHECK(std::abs(c1 - q1) < 1e-12);
  // reality: c_{-1} is the conjugate
  const cplx cm1 = g.coeffs[static_cast<std::size_t>(K - 1)];
  CHECK(std::abs(cm1 - std::conj(c1)) < 1e-13);
}

TEST_CASE("shift acts as g(theta - s)") {
  const auto f = [](double t) {
    return 1.0 + std::cos(two_pi * t) - 0.3 * std::sin(2.0 * two_pi * t);
  };
  const PeriodicFn g = sampled(f, 64, 4);
  const double s = 0.2371;
  const PeriodicFn h = shift_theta(g, s);
  for (double t : {0.0, 0.31, 0.64, 0.95}) CHECK(h.eval(t) == Catch::Approx(f(t - s)).margin(1e-12));
}

TEST_CASE("theta derivative matches finite differences") {
  const auto f = [](double t) { return std::cos(two_pi * t) + 0.5 * std::sin(3.0 * two_pi * t); };
  const PeriodicFn g = sampled(f, 128, 6);
  const PeriodicFn dg = derivative_theta(g);
  const double h = 1e-6;
  for (double t : {0.11, 0.5, 0.83}) {
    const double fd = (f(t + h) - f(t - h)) / (2.0 * h);
    CHECK(dg.eval(t) == Catch::Approx(fd).margin(1e-7));
  }
}

TEST_CASE("minimum location and value") {
  RenormConfig cfg;
  // 2 + cos(2 pi t): minimum 1 at t = 1/2
  const PeriodicFn g = sampled([](double t) { return 2.0 + std::cos(two_pi * t); }, 64, 4);
  const ExtremumResult mn = min_theta(g, cfg);
  CHECK(mn.value == Catch::Approx(1.0).margin(1e-12));
  CHECK(mn.theta == Catch::Approx(0.5).margin(1e-10));
  CHECK_FALSE(mn.degenerate);

  const ExtremumResult mx = max_theta(g, cfg);
  CHECK(mx.value == Catch::Approx(3.0).margin(1e-12));
  CHECK(std::min(mx.theta, 1.0 - mx.theta) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("minimum of a two-well function against grid oracle") {
  RenormConfig cfg;
  const auto f = [](double t) {
    return std::cos(two_pi * t) + 0.8 * std::sin(2.0 * two_pi * t) - 0.2 * std::cos(3.0 * two_pi * t);
  };
  const PeriodicFn g = sampled(f, 128, 8);
  double arg = 0.0;
  const double want = oracle::grid_min(f, 4096, &arg);
  const ExtremumResult mn = min_theta(g, cfg);
  CHECK(mn.value == Catch::Approx(want).margin(1e-10));
  CHECK(std::abs(mn.theta - arg) < 1e-6);
}

TEST_CASE("constant functions flag a degenerate extremum") {
  RenormConfig cfg;
  const PeriodicFn g = periodic_constant(0.7);
  const ExtremumResult mn = min_theta(g, cfg);
  CHECK(mn.degenerate);
  CHECK(mn.value == Catch::Approx(0.7));
}

TEST_CASE("derivative of the minimum along a direction") {
  RenormConfig cfg;
  const PeriodicFn g0 = sampled([](double t) { return 2.0 + std::cos(two_pi * t); }, 64, 4);
  const PeriodicFn g1 =
      sampled([](double t) { return 0.3 - std::sin(two_pi * t) + 0.1 * std::cos(2.0 * two_pi * t); },
              64, 4);
  const double d = dmin(g0, g1, cfg);
  // envelope theorem: derivative is g1 at the minimizer of g0
  CHECK(d == Catch::Approx(g1.eval(0.5)).margin(1e-10));
  // first-order check against the actual perturbed minimum
  for (double t : {1e-4, 1e-5}) {
    const PeriodicFn gt = g0 + t * g1;
    const double m0 = min_theta(g0, cfg).value;
    const double mt = min_theta(gt, cfg).value;
    CHECK((mt - m0) / t == Catch::Approx(d).margin(20.0 * t));
  }
  CHECK_THROWS_AS(dmin(periodic_constant(1.0), g1, cfg), DegenerateMinimum);
}
