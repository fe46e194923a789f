#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/periodic.hpp"
#include "qpr/qpmap.hpp"
#include "qpr/qprenorm.hpp"
#include "qpr/renorm1d.hpp"

namespace qpr {

// The forced logistic family z -> alpha z (1 - z), driven either through the
// parameter, alpha -> alpha (1 + eps cos 2 pi theta), or by an additive term
// eps cos 2 pi theta. Conjugating by x = (z - 1/2)/s, s = (alpha - 2)/4, puts
// the unforced map into the normalized form
//   g_alpha(x) = 1 - (alpha (alpha - 2)/4) x^2,   g(0) = 1,
// and sends the forcing to eps cos(2 pi theta) V(x) with
//   V = g_alpha + 2/(alpha - 2)       (parametric forcing)
//   V = 4/(alpha - 2)                 (additive forcing).

enum class Forcing { multiplicative, additive };

struct NormalizedFamily {
  double alpha = 0.0;
  AnalyticMap1D psi;          // normalized unforced map
  AnalyticMap1D dpsi_dalpha;  // its alpha-derivative
  AnalyticMap1D profile;      // forcing shape V(x) (cosine, mode 1)
};

inline NormalizedFamily flm_normalized(double alpha, Forcing forcing, const DiscDomain& dom) {
  if (alpha <= 2.0) throw ConfigError("normalized family needs alpha > 2");
  NormalizedFamily fam;
  fam.alpha = alpha;
  const double q = alpha * (alpha - 2.0) / 4.0;
  fam.psi = AnalyticMap1D(dom, {1.0, 0.0, -q});
  fam.dpsi_dalpha = AnalyticMap1D(dom, {0.0, 0.0, -(alpha - 1.0) / 2.0});
  if (forcing == Forcing::multiplicative)
    fam.profile = AnalyticMap1D(dom, {alpha / (alpha - 2.0), 0.0, -q});
  else
    fam.profile = AnalyticMap1D(dom, {4.0 / (alpha - 2.0)});
  return fam;
}

// The family as a quasi-periodic map with the forcing on mode 1.
inline QPMap flm_qpmap(double alpha, double eps, Forcing forcing, int K,
                       const DiscDomain& dom) {
  const NormalizedFamily fam = flm_normalized(alpha, forcing, dom);
  QPMap f = qp_uncoupled(fam.psi, std::max(K, 1));
  AnalyticMap1D u = fam.profile;
  for (double& c : u.coeffs) c *= eps;
  qp_set_mode_pair(f, 1, u, AnalyticMap1D(dom, {0.0}));
  return f;
}

// ---------------------------------------------------------------------------
// Superstable parameters of the doubling cascade

struct SuperstableResult {
  double alpha = 0.0;
  int n = 0;
  int iterations = 0;
  double residual = 0.0;  // |l^(2^n)(1/2) - 1/2| at the solution
};

namespace detail {

// Orbit of the critical point and its alpha-derivative, logistic coordinates.
inline void critical_orbit(double alpha, int steps, double& y, double& dy) {
  y = 0.5;
  dy = 0.0;
  for (int j = 0; j < steps; ++j) {
    const double ny = alpha * y * (1.0 - y);
    dy = y * (1.0 - y) + alpha * (1.0 - 2.0 * y) * dy;
    y = ny;
  }
}

}  // namespace detail

// Parameter of the superstable 2^n cycle: l^(2^n)(1/2) = 1/2 with full period.
inline SuperstableResult superstable_alpha(int n) {
  if (n < 0) throw ConfigError("cycle order must be non-negative");
  SuperstableResult res;
  res.n = n;
  if (n == 0) {
    res.alpha = 2.0;
    return res;
  }
  if (n == 1) {
    res.alpha = 1.0 + std::sqrt(5.0);
    double y, dy;
    detail::critical_orbit(res.alpha, 2, y, dy);
    res.residual = std::abs(y - 0.5);
    return res;
  }

  // Walk up the cascade so each solve starts from a geometric extrapolation of
  // the two previous parameters; the gaps shrink fast enough that Newton then
  // lands in the right basin.
  double prev2 = 2.0, prev1 = 1.0 + std::sqrt(5.0);
  const int q0 = 2;
  double alpha = 0.0;
  for (int m = 2; m <= n; ++m) {
    const int q = q0 << (m - 1);
    alpha = prev1 + (prev1 - prev2) / 4.669;
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      double a = alpha;
      ok = true;
      int it = 0;
      for (; it < 100; ++it) {
        double y, dy;
        detail::critical_orbit(a, q, y, dy);
        const double F = y - 0.5;
        if (std::abs(F) < 1e-15) break;
        if (std::abs(dy) < 1e-30 || !std::isfinite(F)) {
          ok = false;
          break;
        }
        double step = -F / dy;
        // never jump past the previous superstable parameter
        if (a + step <= prev1) step = 0.5 * (prev1 - a) + 0.25 * std::abs(step);
        if (std::abs(step) > 0.1) step = step > 0 ? 0.1 : -0.1;
        a += step;
        if (std::abs(step) < 1e-16 * std::abs(a)) break;
      }
      if (ok) {
        double y, dy;
        detail::critical_orbit(a, q, y, dy);
        if (std::abs(y - 0.5) > 1e-12) ok = false;
        // reject roots of lower period
        double ylow, dylow;
        detail::critical_orbit(a, q / 2, ylow, dylow);
        if (std::abs(ylow - 0.5) < 1e-8) ok = false;
        if (ok) {
          alpha = a;
          res.iterations += it;
          res.residual = std::abs(y - 0.5);
        }
      }
      if (!ok) alpha += (attempt == 0 ? 1.0 : -2.0) * 0.2 * (prev1 - prev2) / 4.669;
    }
    if (!ok) throw NoConvergence("superstable parameter search failed");
    prev2 = prev1;
    prev1 = alpha;
  }
  res.alpha = alpha;
  return res;
}

inline std::vector<double> superstable_sequence(int n_max) {
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) s.push_back(superstable_alpha(n).alpha);
  return s;
}

// ---------------------------------------------------------------------------
// First-order data along the renormalization trajectory of the superstable
// family member: the maps f_k = R^k(psi), the parameter direction u_k, and the
// mode-1 forcing pair v_k transported by the rotation block at frequency
// omega_k = 2^k omega_0.

struct RenormSequence {
  double alpha = 0.0;
  std::vector<double> omega;     // omega_0 .. omega_{n-1}
  std::vector<AnalyticMap1D> f;  // f_0 .. f_{n-1}; f_{n-1} is 2-superstable
  std::vector<AnalyticMap1D> u;
  std::vector<ModePair> v;
};

inline RenormSequence renorm_sequences(int n, double omega0, Forcing forcing,
                                       const RenormConfig& cfg) {
  if (n < 1) throw ConfigError("need at least one cascade stage");
  RenormSequence seq;
  seq.alpha = superstable_alpha(n).alpha;
  const DiscDomain dom{0.0, cfg.disc.radius};
  const NormalizedFamily fam = flm_normalized(seq.alpha, forcing, dom);

  seq.f.push_back(fam.psi);
  seq.u.push_back(fam.dpsi_dalpha);
  seq.v.push_back(ModePair{fam.profile, AnalyticMap1D(dom, {0.0})});
  seq.omega.push_back(omega0);

  for (int k = 0; k + 1 < n; ++k) {
    const double wk = seq.omega.back();
    seq.f.push_back(renorm_1d(seq.f.back(), cfg));
    seq.u.push_back(d_renorm_1d(seq.f[static_cast<std::size_t>(k)],
                                seq.u[static_cast<std::size_t>(k)], cfg));
    seq.v.push_back(l_pair_apply(seq.f[static_cast<std::size_t>(k)],
                                 seq.v[static_cast<std::size_t>(k)], two_pi * wk, cfg));
    seq.omega.push_back(std::fmod(2.0 * wk, 1.0));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// The two-step derivative functional along the continued period-2 invariant
// curve of a forced map near the 2-superstable surface, and its linearization
// there. The zero set of the minimum (or maximum) of this functional over
// theta is where reducibility of the invariant curve is lost.

// G(F)(theta) = D_x F(theta + omega, x1(theta + omega)) D_x F(theta, x0(theta))
// where (x0, x1) is the period-2 invariant curve pair continued from (0, 1).
inline PeriodicFn g1_indicator(const QPMap& F, double omega, const RenormConfig& cfg,
                               int n_grid = 256) {
  (void)cfg;
  const DiscDomain dom = F.domain();
  const int K = n_grid / 2 - 1;
  std::vector<double> x0(static_cast<std::size_t>(n_grid), 0.0);
  std::vector<double> x1(static_cast<std::size_t>(n_grid), 1.0);
  std::vector<double> y(static_cast<std::size_t>(n_grid));

  // Graph transform: the curve pair is strongly attracting near the
  // superstable surface, so plain functional iteration converges fast.
  double change = 1.0;
  for (int it = 0; it < 80 && change > 1e-14; ++it) {
    change = 0.0;
    for (int j = 0; j < n_grid; ++j)
      y[static_cast<std::size_t>(j)] =
          qp_eval_real(F, static_cast<double>(j) / n_grid, x0[static_cast<std::size_t>(j)]);
    const PeriodicFn y1 = shift_theta(fit_periodic(y, K), omega);  // x1 candidate
    for (int j = 0; j < n_grid; ++j)
      y[static_cast<std::size_t>(j)] =
          qp_eval_real(F, static_cast<double>(j) / n_grid, x1[static_cast<std::size_t>(j)]);
    const PeriodicFn y0 = shift_theta(fit_periodic(y, K), omega);  // x0 candidate
    for (int j = 0; j < n_grid; ++j) {
      const double th = static_cast<double>(j) / n_grid;
      const double n1 = y1.eval(th), n0 = y0.eval(th);
      change = std::max({change, std::abs(n1 - x1[static_cast<std::size_t>(j)]),
                         std::abs(n0 - x0[static_cast<std::size_t>(j)])});
      if (std::abs(n0 - dom.center) > dom.radius || std::abs(n1 - dom.center) > dom.radius)
        throw OrbitEscape("period-2 curve left the x-disc");
      x1[static_cast<std::size_t>(j)] = n1;
      x0[static_cast<std::size_t>(j)] = n0;
    }
  }
  if (change > 1e-12)
    throw NoConvergence("period-2 invariant curve iteration did not settle");

  const QPMap dF = qp_deriv_x(F);
  const PeriodicFn x1_fn = fit_periodic(x1, K);
  const PeriodicFn x1_ahead = shift_theta(x1_fn, -omega);  // theta -> x1(theta + omega)
  std::vector<double> ind(static_cast<std::size_t>(n_grid));
  for (int j = 0; j < n_grid; ++j) {
    const double th = static_cast<double>(j) / n_grid;
    ind[static_cast<std::size_t>(j)] =
        qp_eval_real(dF, th + omega, x1_ahead.eval(th)) *
        qp_eval_real(dF, th, x0[static_cast<std::size_t>(j)]);
  }
  return fit_periodic(ind, K);
}

// Unforced scalar analogue: multiplier of the period-2 orbit continued from
// the critical 2-cycle {0, 1}.
inline double hat_g1_multiplier(const AnalyticMap1D& g) {
  const AnalyticMap1D dg = derivative_1d(g);
  double p = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double gp = detail::horner_real(g, p);
    const double g2 = detail::horner_real(g, gp);
    const double d = detail::horner_real(dg, gp) * detail::horner_real(dg, p) - 1.0;
    if (std::abs(d) < 1e-12) throw ZeroDenominator("period-2 orbit is not hyperbolic");
    const double step = -(g2 - p) / d;
    p += step;
    if (std::abs(p) > 0.75) throw OrbitEscape("period-2 orbit strayed from the critical pair");
    if (std::abs(step) < 1e-15) break;
  }
  const double gp = detail::horner_real(g, p);
  return detail::horner_real(dg, gp) * detail::horner_real(dg, p);
}

namespace detail {

inline void require_two_superstable(const AnalyticMap1D& f1, double tol) {
  if (std::abs(horner_real(f1, 0.0) - 1.0) > tol || std::abs(horner_real(f1, 1.0)) > tol)
    throw NotOnSigma1("map is not 2-superstable (needs f(0) = 1 and f(1) = 0)");
}

// PeriodicFn of theta -> h(theta, x) at fixed x from a mode table.
inline PeriodicFn qp_slice_at(const QPMap& h, cplx x) {
  const int K = h.max_mode();
  PeriodicFn g;
  g.coeffs.assign(static_cast<std::size_t>(2 * K + 1), cplx(0.0));
  for (int k = -K; k <= K; ++k)
    g.coeffs[static_cast<std::size_t>(k + K)] = horner(h.mode(k), x);
  return g;
}

}  // namespace detail

// Linearization of the two-step derivative functional at an unforced
// 2-superstable map f1, direction h:
//   dG(f1)h(theta) = f'(1) [ f''(0) ( f'(1) h(theta - 2w, 0) + h(theta - w, 1) )
//                            + d_x h(theta, 0) ].
inline PeriodicFn d_g1_indicator(const AnalyticMap1D& f1, const QPMap& h, double omega,
                                 const RenormConfig& cfg) {
  detail::require_two_superstable(f1, 1e-6);
  const AnalyticMap1D df = derivative_1d(f1);
  const AnalyticMap1D ddf = derivative_1d(df);
  const double p1 = detail::horner_real(df, 1.0);
  const double p20 = detail::horner_real(ddf, 0.0);
  (void)cfg;

  const PeriodicFn h0 = detail::qp_slice_at(h, cplx(0.0));
  const PeriodicFn h1 = detail::qp_slice_at(h, cplx(1.0));
  const PeriodicFn hd0 = detail::qp_slice_at(qp_deriv_x(h), cplx(0.0));
  const PeriodicFn inner =
      (p20 * p1) * shift_theta(h0, 2.0 * omega) + p20 * shift_theta(h1, omega) + hd0;
  return p1 * inner;
}

// Scalar counterpart for the unforced direction u.
inline double d_hat_g1_multiplier(const AnalyticMap1D& f1, const AnalyticMap1D& u) {
  detail::require_two_superstable(f1, 1e-6);
  const AnalyticMap1D df = derivative_1d(f1);
  const AnalyticMap1D ddf = derivative_1d(df);
  const AnalyticMap1D du = derivative_1d(u);
  const double p1 = detail::horner_real(df, 1.0);
  const double p20 = detail::horner_real(ddf, 0.0);
  const double den = p20 * (p1 * detail::horner_real(u, 0.0) + detail::horner_real(u, 1.0)) +
                     detail::horner_real(du, 0.0);
  return p1 * den;
}

// ---------------------------------------------------------------------------
// First-order slopes of the reducibility-loss boundaries at (alpha_n, 0)

struct SlopeResult {
  int n = 0;
  double alpha = 0.0;       // superstable parameter of the stage
  double omega_end = 0.0;   // rotation number at the final stage
  double slope_plus = 0.0;  // branch where the indicator minimum crosses zero
  double slope_minus = 0.0;
  double theta_plus = 0.0;  // extremizing phases of the linearized indicator
  double theta_minus = 0.0;
  double den = 0.0;
  double num_min = 0.0;
  double num_max = 0.0;
  bool degenerate = false;
};

// Slopes d alpha / d eps of the two reducibility-loss boundary branches
// emanating from the cascade point (alpha_n, eps = 0), computed from the
// renormalized first-order data at the 2-superstable stage.
inline SlopeResult slopes_at_stage(const RenormSequence& seq, const RenormConfig& cfg) {
  const std::size_t last = seq.f.size() - 1;
  const AnalyticMap1D& f1 = seq.f[last];
  const AnalyticMap1D& u = seq.u[last];
  const ModePair& vp = seq.v[last];
  const double w = seq.omega[last];
  detail::require_two_superstable(f1, 1e-6);

  SlopeResult out;
  out.n = static_cast<int>(seq.f.size());
  out.alpha = seq.alpha;
  out.omega_end = w;

  // forcing pair as a quasi-periodic direction on mode 1
  QPMap hv = qp_uncoupled(AnalyticMap1D(f1.domain, {0.0}), 1);
  qp_set_mode_pair(hv, 1, vp.u, vp.v);

  const PeriodicFn dg1v = d_g1_indicator(f1, hv, w, cfg);
  const double dg1u = d_hat_g1_multiplier(f1, u);

  const AnalyticMap1D df = derivative_1d(f1);
  const double p1 = detail::horner_real(df, 1.0);
  out.den = dg1u / p1;

  const double scale = std::max(1.0, std::abs(dg1u));
  if (norm_periodic(dg1v) < 1e-13 * scale) {
    out.degenerate = true;
    return out;
  }
  if (std::abs(dg1u) < 1e-12 * std::max(1.0, norm_periodic(dg1v)))
    throw ZeroDenominator("unforced direction is tangent to the superstable surface");

  const ExtremumResult mn = min_theta(dg1v, cfg);
  const ExtremumResult mx = max_theta(dg1v, cfg);
  out.slope_plus = -mn.value / dg1u;
  out.slope_minus = -mx.value / dg1u;
  out.theta_plus = mn.theta;
  out.theta_minus = mx.theta;
  out.num_min = std::min(mn.value / p1, mx.value / p1);
  out.num_max = std::max(mn.value / p1, mx.value / p1);
  return out;
}

inline SlopeResult boundary_slopes(int n, double omega0, Forcing forcing,
                                   const RenormConfig& cfg) {
  return slopes_at_stage(renorm_sequences(n, omega0, forcing, cfg), cfg);
}

}  // namespace qpr
