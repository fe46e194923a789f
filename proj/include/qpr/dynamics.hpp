#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/families.hpp"
#include "qpr/periodic.hpp"
#include "qpr/qpmap.hpp"

namespace qpr {

// Direct simulation of the forced logistic family. Everything here works on
// closed-form point evaluations and grid transforms only — none of the series
// pipelines — so it can serve as an independent check of the renormalization
// predictions.

struct SkewParams {
  double alpha = 0.0;
  double eps = 0.0;
  double omega = 0.0;
  Forcing forcing = Forcing::multiplicative;
};

inline double flm_step(const SkewParams& p, double theta, double x) {
  const double q = p.alpha * (p.alpha - 2.0) / 4.0;
  const double c = std::cos(two_pi * theta);
  const double v = p.forcing == Forcing::multiplicative
                       ? p.alpha / (p.alpha - 2.0) - q * x * x
                       : 4.0 / (p.alpha - 2.0);
  return 1.0 - q * x * x + p.eps * c * v;
}

inline double flm_dstep(const SkewParams& p, double theta, double x) {
  const double q = p.alpha * (p.alpha - 2.0) / 4.0;
  const double c = std::cos(two_pi * theta);
  const double dv = p.forcing == Forcing::multiplicative ? -2.0 * q * x : 0.0;
  return -2.0 * q * x + p.eps * c * dv;
}

// x-coordinate after `steps` iterations of the skew product.
inline double flm_orbit(const SkewParams& p, double theta0, double x0, long steps) {
  double th = theta0, x = x0;
  for (long i = 0; i < steps; ++i) {
    x = flm_step(p, th, x);
    th += p.omega;
    if (th >= 1.0) th -= 1.0;
    if (std::abs(x) > 10.0) throw OrbitEscape("orbit left the trapping region");
  }
  return x;
}

// Same for a general quasi-periodic map given by its mode table.
inline double qp_orbit_x(const QPMap& f, double omega, double theta0, double x0, int steps) {
  double th = theta0, x = x0;
  for (int i = 0; i < steps; ++i) {
    x = qp_eval_real(f, th, x);
    th += omega;
    if (std::abs(x - f.domain().center) > f.domain().radius)
      throw OrbitEscape("orbit left the x-disc");
  }
  return x;
}

inline double qp_orbit_dx(const QPMap& f, double omega, double theta0, double x0, int steps) {
  const QPMap df = qp_deriv_x(f);
  double th = theta0, x = x0, d = 1.0;
  for (int i = 0; i < steps; ++i) {
    d *= qp_eval_real(df, th, x);
    x = qp_eval_real(f, th, x);
    th += omega;
    if (std::abs(x - f.domain().center) > f.domain().radius)
      throw OrbitEscape("orbit left the x-disc");
  }
  return d;
}

// ---------------------------------------------------------------------------
// Invariant curves of the 2^n-th iterate

struct InvariantCurve {
  int n = 0;  // the curve is invariant under the 2^n-step map
  double alpha = 0.0, eps = 0.0, omega = 0.0;
  PeriodicFn x;
  double residual = 0.0;
  double lyapunov = 0.0;  // per-step average along the curve system
  bool lyapunov_floored = false;
};

namespace detail {

// Dense matrix of the band-limited shift v(theta) -> v(theta + s) on an
// n-point grid, built column by column through the FFT.
inline Eigen::MatrixXd shift_matrix(int n, double s) {
  std::vector<cplx> rot(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int signed_k = k <= n / 2 ? k : k - n;
    if (k == n / 2)
      rot[static_cast<std::size_t>(k)] = std::cos(two_pi * (n / 2) * s);
    else
      rot[static_cast<std::size_t>(k)] = std::polar(1.0, two_pi * signed_k * s);
  }
  Eigen::MatrixXd S(n, n);
  std::vector<cplx> buf(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    buf[static_cast<std::size_t>(l)] = cplx(1.0);
    fft_inplace(buf, -1);
    for (int k = 0; k < n; ++k) buf[static_cast<std::size_t>(k)] *= rot[static_cast<std::size_t>(k)];
    fft_inplace(buf, +1);
    for (int j = 0; j < n; ++j)
      S(j, l) = buf[static_cast<std::size_t>(j)].real() / static_cast<double>(n);
  }
  return S;
}

// q-step fiber image and derivative starting on the grid node.
inline void q_step(const SkewParams& p, int q, double theta, double& x, double& dx) {
  double th = theta;
  dx = 1.0;
  for (int i = 0; i < q; ++i) {
    dx *= flm_dstep(p, th, x);
    x = flm_step(p, th, x);
    th += p.omega;
    if (th >= 1.0) th -= 1.0;
    if (std::abs(x) > 10.0) throw OrbitEscape("orbit left the trapping region");
  }
}

}  // namespace detail

// Newton solve for a curve X with F^(q)(theta, X(theta)) = X(theta + q omega),
// q = 2^n, seeded from the transient of the critical point unless a previous
// curve is supplied.
inline InvariantCurve find_invariant_curve(const SkewParams& par, int n, const RenormConfig& cfg,
                                           int n_grid = 256,
                                           const PeriodicFn* seed = nullptr) {
  (void)cfg;
  const int q = 1 << n;
  InvariantCurve out;
  out.n = n;
  out.alpha = par.alpha;
  out.eps = par.eps;
  out.omega = par.omega;

  Eigen::VectorXd X(n_grid);
  if (seed && !seed->coeffs.empty()) {
    for (int j = 0; j < n_grid; ++j) X(j) = seed->eval(static_cast<double>(j) / n_grid);
  } else {
    // march the critical point onto the attractor, ending exactly at the node
    // after a multiple of q steps so every node lands on the same branch
    const long m = ((10000 + q - 1) / q) * q;
    for (int j = 0; j < n_grid; ++j) {
      double th0 = static_cast<double>(j) / n_grid - static_cast<double>(m) * par.omega;
      th0 -= std::floor(th0);
      X(j) = flm_orbit(par, th0, 0.0, m);
    }
  }

  const double qshift = std::fmod(static_cast<double>(q) * par.omega, 1.0);
  const Eigen::MatrixXd S = detail::shift_matrix(n_grid, qshift);
  Eigen::VectorXd r(n_grid), d(n_grid);
  double rnorm = 1.0;
  for (int it = 0; it < 40 && rnorm > 1e-13; ++it) {
    const Eigen::VectorXd SX = S * X;
    rnorm = 0.0;
    for (int j = 0; j < n_grid; ++j) {
      double x = X(j), dx;
      detail::q_step(par, q, static_cast<double>(j) / n_grid, x, dx);
      r(j) = x - SX(j);
      d(j) = dx;
      rnorm = std::max(rnorm, std::abs(r(j)));
    }
    if (rnorm <= 1e-13) break;
    Eigen::MatrixXd J = -S;
    for (int j = 0; j < n_grid; ++j) J(j, j) += d(j);
    X += J.partialPivLu().solve(-r);
  }
  if (rnorm > 1e-10) throw NoConvergence("invariant-curve Newton did not converge");
  out.residual = rnorm;

  // lower-period curve satisfies the q-step equation too; reject it
  if (n >= 1) {
    const Eigen::MatrixXd Sh = detail::shift_matrix(n_grid, std::fmod((q / 2) * par.omega, 1.0));
    const Eigen::VectorXd SX = Sh * X;
    double dev = 0.0;
    for (int j = 0; j < n_grid; ++j) {
      double x = X(j), dx;
      detail::q_step(par, q / 2, static_cast<double>(j) / n_grid, x, dx);
      dev = std::max(dev, std::abs(x - SX(j)));
    }
    if (dev < 1e-6) throw PeriodMismatch("curve is invariant already under the half-period map");
  }

  std::vector<double> vals(static_cast<std::size_t>(n_grid));
  for (int j = 0; j < n_grid; ++j) vals[static_cast<std::size_t>(j)] = X(j);
  out.x = fit_periodic(vals, n_grid / 2 - 1);

  // per-step Lyapunov exponent along the curve system, Lebesgue average in theta
  const int n_ly = 4096;
  const double floor_log = std::log(1e-300);
  double acc = 0.0;
  for (int j = 0; j < n_ly; ++j) {
    const double th0 = static_cast<double>(j) / n_ly;
    double th = th0, x = out.x.eval(th0);
    for (int i = 0; i < q; ++i) {
      const double dd = std::abs(flm_dstep(par, th, x));
      double lg = dd > 0.0 ? std::log(dd) : floor_log;
      if (lg < floor_log) lg = floor_log;
      if (lg == floor_log) out.lyapunov_floored = true;
      acc += lg;
      x = flm_step(par, th, x);
      th += par.omega;
      if (th >= 1.0) th -= 1.0;
    }
  }
  out.lyapunov = acc / (static_cast<double>(n_ly) * q);
  return out;
}

inline InvariantCurve attracting_invariant_curve(const SkewParams& par, int n,
                                                 const RenormConfig& cfg, int n_grid = 256,
                                                 const PeriodicFn* seed = nullptr) {
  InvariantCurve c = find_invariant_curve(par, n, cfg, n_grid, seed);
  if (c.lyapunov >= -cfg.k0)
    throw NonAttracting("invariant curve is not uniformly attracting");
  return c;
}

// ---------------------------------------------------------------------------
// Reducibility indicator: extrema over theta of the q-step fiber derivative
// along the curve. A sign change of the indicator across theta is exactly the
// loss of reducibility of the linearized dynamics.

struct IndicatorExtrema {
  double min = 0.0, max = 0.0;
  double theta_min = 0.0, theta_max = 0.0;
};

namespace detail {

inline double indicator_value(const SkewParams& par, int q, const PeriodicFn& curve,
                              double theta) {
  double x = curve.eval(theta), dx;
  q_step(par, q, theta, x, dx);
  return dx;
}

}  // namespace detail

inline IndicatorExtrema reducibility_indicator(const SkewParams& par,
                                               const InvariantCurve& curve,
                                               int n_scan = 2048) {
  const int q = 1 << curve.n;
  IndicatorExtrema ex;
  double vmin = 1e300, vmax = -1e300;
  int jmin = 0, jmax = 0;
  for (int j = 0; j < n_scan; ++j) {
    const double v = detail::indicator_value(par, q, curve.x, static_cast<double>(j) / n_scan);
    if (v < vmin) {
      vmin = v;
      jmin = j;
    }
    if (v > vmax) {
      vmax = v;
      jmax = j;
    }
  }
  const auto refine = [&](int j0, double sign) {
    double lo = (j0 - 1.0) / n_scan, hi = (j0 + 1.0) / n_scan;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (sign * detail::indicator_value(par, q, curve.x, m1) <
          sign * detail::indicator_value(par, q, curve.x, m2))
        hi = m2;
      else
        lo = m1;
    }
    return 0.5 * (lo + hi);
  };
  ex.theta_min = refine(jmin, +1.0);
  ex.theta_max = refine(jmax, -1.0);
  ex.min = detail::indicator_value(par, q, curve.x, ex.theta_min);
  ex.max = detail::indicator_value(par, q, curve.x, ex.theta_max);
  ex.theta_min -= std::floor(ex.theta_min);
  ex.theta_max -= std::floor(ex.theta_max);
  return ex;
}

// ---------------------------------------------------------------------------
// Reducibility-loss boundary in the (alpha, eps) plane

enum class Branch { plus, minus };  // indicator minimum / maximum crossing zero

struct BoundaryPoint {
  double eps = 0.0;
  double alpha = 0.0;
  double indicator_min = 0.0;
  double indicator_max = 0.0;
  double lyapunov = 0.0;
};

struct BoundaryTrace {
  int n = 0;
  Branch branch = Branch::plus;
  double omega = 0.0;
  Forcing forcing = Forcing::multiplicative;
  double alpha_star = 0.0;  // superstable parameter, the eps -> 0 limit
  std::vector<BoundaryPoint> points;
  double slope_raw = 0.0;           // finite-eps slope at the smallest eps
  double slope_extrapolated = 0.0;  // Richardson limit of (alpha - alpha*)/eps
  double alpha_extrapolated = 0.0;  // Richardson limit of the endpoint itself
};

namespace detail {

// Signed indicator extremum for the branch, with curve continuation.
inline std::optional<double> branch_value(const SkewParams& par, int n, Branch br,
                                          const RenormConfig& cfg,
                                          std::optional<PeriodicFn>& seed,
                                          BoundaryPoint* detail_out = nullptr) {
  try {
    const InvariantCurve c =
        find_invariant_curve(par, n, cfg, 256, seed ? &*seed : nullptr);
    seed = c.x;
    const IndicatorExtrema ex = reducibility_indicator(par, c);
    if (detail_out) {
      detail_out->eps = par.eps;
      detail_out->alpha = par.alpha;
      detail_out->indicator_min = ex.min;
      detail_out->indicator_max = ex.max;
      detail_out->lyapunov = c.lyapunov;
    }
    return br == Branch::plus ? ex.min : ex.max;
  } catch (const ConvergenceError&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Root of the branch indicator in alpha at fixed eps, by bracketing and
// bisection; `alpha_seed`/`width` localize the search.
inline BoundaryPoint boundary_alpha(int n, double eps, double omega, Forcing forcing, Branch br,
                                    double alpha_seed, double width, const RenormConfig& cfg) {
  std::optional<PeriodicFn> seed;
  SkewParams par{alpha_seed, eps, omega, forcing};
  const auto value_at = [&](double a) {
    par.alpha = a;
    return detail::branch_value(par, n, br, cfg, seed);
  };

  double lo = alpha_seed, hi = alpha_seed;
  auto flo = value_at(lo);
  if (!flo) throw WindowNotFound("no invariant curve at the search seed");
  auto fhi = flo;
  // the indicator decreases through zero as alpha increases across the window
  bool have = false;
  double w = width;
  for (int k = 0; k < 60 && !have; ++k) {
    if (*flo < 0.0) {
      lo -= w;
      const auto v = value_at(lo);
      if (!v) throw WindowNotFound("left the doubling window while bracketing");
      flo = v;
    } else if (*fhi >= 0.0) {
      hi += w;
      const auto v = value_at(hi);
      if (!v) throw WindowNotFound("left the doubling window while bracketing");
      fhi = v;
    }
    have = *flo >= 0.0 && *fhi < 0.0;
    w *= 1.7;
  }
  if (!have) throw RootLost("indicator does not change sign near the seed");

  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto v = value_at(mid);
    if (!v) throw RootLost("curve lost during bisection");
    if (*v >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  BoundaryPoint bp;
  const double root = 0.5 * (lo + hi);
  par.alpha = root;
  std::optional<PeriodicFn> s2 = seed;
  if (!detail::branch_value(par, n, br, cfg, s2, &bp)) throw RootLost("root re-evaluation failed");
  return bp;
}

// Trace the branch along a halving eps ladder and Richardson-extrapolate both
// the slope and the endpoint to eps = 0.
inline BoundaryTrace trace_boundary(int n, double omega, Forcing forcing, Branch br,
                                    const std::vector<double>& eps_ladder,
                                    const RenormConfig& cfg) {
  if (eps_ladder.size() < 3) throw ConfigError("need at least three eps values");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (std::abs(eps_ladder[i - 1] / eps_ladder[i] - 2.0) > 1e-9)
      throw ConfigError("eps ladder must halve at each step");

  BoundaryTrace tr;
  tr.n = n;
  tr.branch = br;
  tr.omega = omega;
  tr.forcing = forcing;
  tr.alpha_star = superstable_alpha(n).alpha;

  double seed_alpha = tr.alpha_star;
  double width = std::max(1e-6, 2.0 * eps_ladder.front());
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    const BoundaryPoint bp =
        boundary_alpha(n, eps_ladder[i], omega, forcing, br, seed_alpha, width, cfg);
    tr.points.push_back(bp);
    // next root sits near alpha* + slope * eps/2
    seed_alpha = tr.alpha_star + 0.5 * (bp.alpha - tr.alpha_star);
    width = std::max(1e-9, 0.25 * std::abs(bp.alpha - tr.alpha_star));
  }

  const std::size_t m = tr.points.size();
  const double a1 = tr.points[m - 3].alpha, a2 = tr.points[m - 2].alpha,
               a3 = tr.points[m - 1].alpha;
  const double e1 = tr.points[m - 3].eps, e2 = tr.points[m - 2].eps, e3 = tr.points[m - 1].eps;
  const double s1 = (a1 - tr.alpha_star) / e1;
  const double s2 = (a2 - tr.alpha_star) / e2;
  const double s3 = (a3 - tr.alpha_star) / e3;
  tr.slope_raw = s3;
  const double t1 = 2.0 * s2 - s1, t2 = 2.0 * s3 - s2;
  tr.slope_extrapolated = (4.0 * t2 - t1) / 3.0;
  const double d1 = 2.0 * a2 - a1, d2 = 2.0 * a3 - a2;
  tr.alpha_extrapolated = (4.0 * d2 - d1) / 3.0;
  return tr;
}

// ---------------------------------------------------------------------------
// Point classification for parameter-plane scans

enum class PointClass { reducible, nonreducible, nonattracting, lower_period, no_curve };

struct ReducibilityScanPoint {
  double alpha = 0.0, eps = 0.0;
  PointClass cls = PointClass::no_curve;
  double indicator_min = 0.0, indicator_max = 0.0;
  double lyapunov = 0.0;
  bool lyapunov_floored = false;
};

inline ReducibilityScanPoint classify_point(const SkewParams& par, int n,
                                            const RenormConfig& cfg) {
  ReducibilityScanPoint pt;
  pt.alpha = par.alpha;
  pt.eps = par.eps;
  try {
    const InvariantCurve c = find_invariant_curve(par, n, cfg);
    const IndicatorExtrema ex = reducibility_indicator(par, c);
    pt.indicator_min = ex.min;
    pt.indicator_max = ex.max;
    pt.lyapunov = c.lyapunov;
    pt.lyapunov_floored = c.lyapunov_floored;
    if (c.lyapunov >= -cfg.k0)
      pt.cls = PointClass::nonattracting;
    else if (ex.min < 0.0 && ex.max > 0.0)
      pt.cls = PointClass::nonreducible;
    else
      pt.cls = PointClass::reducible;
  } catch (const PeriodMismatch&) {
    pt.cls = PointClass::lower_period;
  } catch (const ConvergenceError&) {
    pt.cls = PointClass::no_curve;
  } catch (const DomainError&) {
    pt.cls = PointClass::no_curve;
  }
  return pt;
}

}  // namespace qpr
