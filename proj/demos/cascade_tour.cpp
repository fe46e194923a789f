// A short tour: the doubling fixed point, its leading eigenvalue, the cascade
// of superstable parameters, and the first-order reducibility-loss slopes for
// the forced logistic family, cross-checked once against direct simulation.

#include <cmath>
#include <cstdio>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/dynamics.hpp"
#include "qpr/families.hpp"
#include "qpr/renorm1d.hpp"

int main() {
  using namespace qpr;
  RenormConfig cfg;
  cfg.n_x = 40;
  cfg.validate();

  const DiscDomain dom{0.0, cfg.disc.radius};
  const FixedPointResult fp = solve_fixed_point(AnalyticMap1D(dom, {1.0, 0.0, -1.4}), cfg);
  std::printf("fixed point:  a = %.12f   residual = %.2e   (%d Newton steps)\n", fp.a,
              fp.residual, fp.iterations);

  const auto ev = dr_spectrum(fp.phi, cfg);
  std::printf("derivative spectrum:  lambda_1 = %.9f   lambda_2 = %.6f\n", ev[0].real(),
              std::abs(ev[1]));

  std::printf("\nsuperstable cascade (ratios approach lambda_1):\n");
  const auto s = superstable_sequence(6);
  for (std::size_t n = 2; n < s.size(); ++n)
    std::printf("  n=%zu  alpha = %.12f   ratio = %.6f\n", n, s[n],
                (s[n - 1] - s[n - 2]) / (s[n] - s[n - 1]));

  const double omega = cfg.omega;  // golden mean
  std::printf("\nboundary slopes at the cascade points (drive omega = %.6f):\n", omega);
  for (int n = 1; n <= 2; ++n) {
    const SlopeResult sl = boundary_slopes(n, omega, Forcing::multiplicative, cfg);
    std::printf("  n=%d  slope_plus = %+.6f   slope_minus = %+.6f\n", n, sl.slope_plus,
                sl.slope_minus);
  }

  std::printf("\ndirect-dynamics check at n=1 (plus branch):\n");
  const BoundaryTrace tr = trace_boundary(1, omega, Forcing::multiplicative, Branch::plus,
                                          {1e-3, 5e-4, 2.5e-4}, cfg);
  const SlopeResult sl1 = boundary_slopes(1, omega, Forcing::multiplicative, cfg);
  std::printf("  formula %.8f   dynamics %.8f   endpoint gap %.2e\n", sl1.slope_plus,
              tr.slope_extrapolated, std::abs(tr.alpha_extrapolated - tr.alpha_star));
  return 0;
}
