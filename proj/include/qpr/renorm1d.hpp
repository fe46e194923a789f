#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"

namespace qpr {

// Doubling renormalization of even unimodal maps psi with psi(0) = 1:
//   R(psi)(x) = (1/a) psi(psi(a x)),  a = psi(1).
// Internally an even map is the polynomial P in u = x^2 with P(0) = 1;
// the solver state is exactly the coefficients of x^2, x^4, ...

struct UnimodalCheckReport {
  double psi0 = 0.0;
  bool monotone_ok = false;
  double a = 0.0;
  double a_prime = 0.0;
  double b_prime = 0.0;
  bool in_M_delta = false;
  bool in_D_R_delta = false;
};

struct FixedPointResult {
  AnalyticMap1D phi;
  double a = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

// P(u) with real coefficients, evaluated by Horner.
inline cplx peval(const std::vector<double>& p, cplx u) {
  cplx acc(0.0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
  return acc;
}

inline double peval(const std::vector<double>& p, double u) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
  return acc;
}

inline std::vector<double> pderiv(const std::vector<double>& p) {
  if (p.size() <= 1) return {0.0};
  std::vector<double> d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
  return d;
}

// Even-coefficient view u^k -> x^{2k} of a center-0 map. Throws if the map is
// materially odd or not centered at 0.
inline std::vector<double> even_coeffs(const AnalyticMap1D& psi, double tol) {
  if (psi.domain.center != 0.0)
    throw DomainError("even map operations require Taylor data about 0");
  double scale = 1.0;
  for (double c : psi.coeffs) scale = std::max(scale, std::abs(c));
  if (odd_part_norm(psi) > tol * scale * 1e3)
    throw DomainError("map has a non-negligible odd part");
  std::vector<double> p((psi.coeffs.size() + 1) / 2, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k)
    if (2 * k < psi.coeffs.size()) p[k] = psi.coeffs[2 * k];
  return p;
}

inline AnalyticMap1D from_even_coeffs(const std::vector<double>& p, const DiscDomain& d) {
  AnalyticMap1D psi;
  psi.domain = d;
  psi.coeffs.assign(2 * p.size() - 1, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) psi.coeffs[2 * k] = p[k];
  return psi;
}

// Shared sample-circle data for the doubling operator and its derivative,
// all in the u = x^2 coordinate. The u sampling radius is the square of the
// x fit circle, so x-space and u-space pipelines view the same circle.
struct EvenOpSamples {
  double a = 0.0;
  double rho = 0.0;
  std::vector<cplx> u, pa2u, q, dpq, dpa2u, pq;
};

inline EvenOpSamples even_op_samples(const std::vector<double>& p, const DiscDomain& dom,
                                     const RenormConfig& cfg, int n_keep) {
  EvenOpSamples s;
  s.a = peval(p, 1.0);
  const double rx = kFitFraction * dom.radius;
  s.rho = rx * rx;
  const int m = effective_nodes(cfg.m_nodes, n_keep);
  const auto dp = pderiv(p);
  s.u.resize(static_cast<std::size_t>(m));
  s.pa2u.resize(s.u.size());
  s.q.resize(s.u.size());
  s.dpq.resize(s.u.size());
  s.dpa2u.resize(s.u.size());
  s.pq.resize(s.u.size());
  const double a2 = s.a * s.a;
  for (int j = 0; j < m; ++j) {
    const double ang = two_pi * j / m;
    const cplx uj = s.rho * cplx(std::cos(ang), std::sin(ang));
    const cplx a2u = a2 * uj;
    const cplx pa2u = peval(p, a2u);
    const cplx q = pa2u * pa2u;
    s.u[static_cast<std::size_t>(j)] = uj;
    s.pa2u[static_cast<std::size_t>(j)] = pa2u;
    s.q[static_cast<std::size_t>(j)] = q;
    s.dpq[static_cast<std::size_t>(j)] = peval(dp, q);
    s.dpa2u[static_cast<std::size_t>(j)] = peval(dp, a2u);
    s.pq[static_cast<std::size_t>(j)] = peval(p, q);
  }
  return s;
}

// u-coefficients of R(psi) from precomputed samples.
inline std::vector<double> renorm_even(const EvenOpSamples& s, int n_keep) {
  std::vector<cplx> vals(s.u.size());
  for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = s.pq[j] / s.a;
  return real_parts(coeffs_from_circle(std::move(vals), s.rho, n_keep));
}

// u-coefficients of the derivative of R at psi in direction h (both even):
//   dR(psi)h = (1/a) psi'(psi(ax)) h(ax) + (1/a) h(psi(ax))
//            + (b/a) psi'(psi(ax)) psi'(ax) x - (b/a^2) psi(psi(ax)),  b = h(1).
inline std::vector<double> d_renorm_even(const EvenOpSamples& s, const std::vector<double>& h,
                                         int n_keep) {
  const double b = peval(h, 1.0);
  const double a2 = s.a * s.a;
  std::vector<cplx> vals(s.u.size());
  for (std::size_t j = 0; j < vals.size(); ++j) {
    const cplx ha2u = peval(h, a2 * s.u[j]);
    const cplx hq = peval(h, s.q[j]);
    vals[j] = (2.0 / s.a) * s.pa2u[j] * s.dpq[j] * ha2u + hq / s.a +
              4.0 * b * s.u[j] * s.pa2u[j] * s.dpq[j] * s.dpa2u[j] -
              (b / (s.a * s.a)) * s.pq[j];
  }
  return real_parts(coeffs_from_circle(std::move(vals), s.rho, n_keep));
}

inline std::vector<double> i_delta_grid(double delta, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    xs[static_cast<std::size_t>(i)] = -1.0 - delta + (2.0 + 2.0 * delta) * i / (n - 1);
  return xs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Membership checks

// Even unimodal map of I_delta into itself, psi(0) = 1, x psi'(x) < 0 off 0.
inline UnimodalCheckReport check_M_delta(const AnalyticMap1D& psi, const RenormConfig& cfg) {
  UnimodalCheckReport rep;
  const double tol = cfg.tol_residual;
  rep.psi0 = detail::horner_real(psi, 0.0);
  const AnalyticMap1D dpsi = derivative_1d(psi);

  bool even_ok = true, range_ok = true;
  rep.monotone_ok = true;
  const auto xs = detail::i_delta_grid(cfg.delta, 513);
  for (double x : xs) {
    const double v = detail::horner_real(psi, x);
    if (v < -1.0 - cfg.delta - tol || v > 1.0 + cfg.delta + tol) range_ok = false;
    if (std::abs(v - detail::horner_real(psi, -x)) > tol * 1e2) even_ok = false;
    if (std::abs(x) > 1e-3 && x * detail::horner_real(dpsi, x) >= 0.0) rep.monotone_ok = false;
  }
  rep.a = detail::horner_real(psi, 1.0);
  rep.a_prime = (1.0 + cfg.delta) * rep.a;
  rep.b_prime = detail::horner_real(psi, rep.a_prime);
  rep.in_M_delta =
      std::abs(rep.psi0 - 1.0) <= tol * 1e2 && rep.monotone_ok && range_ok && even_ok;
  rep.in_D_R_delta = false;
  return rep;
}

// Open renormalizability set: a < 0, 1 > b' > -a', psi(b') < -a'; strict
// inequalities carry the tol_residual margin.
inline UnimodalCheckReport check_D_R_delta(const AnalyticMap1D& psi, const RenormConfig& cfg) {
  UnimodalCheckReport rep = check_M_delta(psi, cfg);
  const double tol = cfg.tol_residual;
  const double psi_b = detail::horner_real(psi, rep.b_prime);
  rep.in_D_R_delta = rep.in_M_delta && rep.a < -tol && rep.b_prime < 1.0 - tol &&
                     rep.b_prime > -rep.a_prime + tol && psi_b < -rep.a_prime - tol;
  return rep;
}

// ---------------------------------------------------------------------------
// The operator and its derivative

inline AnalyticMap1D renorm_1d(const AnalyticMap1D& psi, const RenormConfig& cfg) {
  const UnimodalCheckReport rep = check_D_R_delta(psi, cfg);
  if (!rep.in_D_R_delta) throw NotRenormalizable("map is outside the renormalizable set");
  const auto p = detail::even_coeffs(psi, cfg.tol_residual);
  const int mu = cfg.n_x / 2 + 1;
  const auto s = detail::even_op_samples(p, psi.domain, cfg, mu);
  return detail::from_even_coeffs(detail::renorm_even(s, mu), psi.domain);
}

// Pointwise residual sup |R(psi) - psi| over a grid of I_delta, evaluated by
// nested Horner only (independent of the coefficient pipeline).
inline double renorm_residual_sup(const AnalyticMap1D& psi, const RenormConfig& cfg) {
  const double a = detail::horner_real(psi, 1.0);
  double worst = 0.0;
  for (double x : detail::i_delta_grid(cfg.delta, 1025)) {
    const double rx = detail::horner_real(psi, detail::horner_real(psi, a * x)) / a;
    worst = std::max(worst, std::abs(rx - detail::horner_real(psi, x)));
  }
  return worst;
}

// Directional (Gateaux) derivative of R at psi, direction h. Accepts any h on
// the same center; result is refit about psi's center in x coordinates.
inline AnalyticMap1D d_renorm_1d(const AnalyticMap1D& psi, const AnalyticMap1D& h,
                                 const RenormConfig& cfg) {
  if (psi.domain.center != h.domain.center)
    throw DomainError("psi and h must share a center");
  const double a = detail::horner_real(psi, 1.0);
  if (!(a < -1e-8)) throw NotRenormalizable("psi(1) must be negative");
  const double b = detail::horner_real(h, 1.0);
  const AnalyticMap1D dpsi = derivative_1d(psi);

  const double rho = kFitFraction * psi.domain.radius;
  const int n_out = std::max(cfg.n_x, std::max(psi.degree(), h.degree()));
  const int m = detail::effective_nodes(cfg.m_nodes, n_out);
  const auto z = detail::circle_nodes(psi.domain, rho, m);
  std::vector<cplx> vals(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const cplx az = a * z[j];
    const cplx pz = detail::horner(psi, az);
    if (std::abs(pz - cplx(h.domain.center)) > h.domain.radius * 2.0 + 1.0)
      throw ImageEscape("psi(a z) leaves the direction's validity region");
    const cplx dp_pz = detail::horner(dpsi, pz);
    vals[j] = (dp_pz * detail::horner(h, az) + detail::horner(h, pz)) / a +
              (b / a) * dp_pz * detail::horner(dpsi, az) * z[j] -
              (b / (a * a)) * detail::horner(psi, pz);
  }
  auto ck = detail::coeffs_from_circle(std::move(vals), rho, n_out + 1);
  AnalyticMap1D out;
  out.domain = psi.domain;
  out.coeffs = detail::real_parts(ck);
  return out;
}

// ---------------------------------------------------------------------------
// Fixed point (Newton on the even coefficients with psi(0) = 1 eliminated)

inline FixedPointResult solve_fixed_point(const AnalyticMap1D& initial, const RenormConfig& cfg) {
  const int mu = cfg.n_x / 2;  // unknowns: coefficients of u^1..u^mu
  auto p0 = detail::even_coeffs(initial, cfg.tol_residual);
  if (std::abs(p0.empty() ? 0.0 : p0[0] - 1.0) > 1e-6)
    throw DomainError("initial map must satisfy psi(0) = 1");
  std::vector<double> p(static_cast<std::size_t>(mu + 1), 0.0);
  p[0] = 1.0;
  for (std::size_t k = 1; k < p.size() && k < p0.size(); ++k) p[k] = p0[k];

  // Residual in the u-coefficient sup bound over I_delta (dominates the real
  // interval sup, so convergence in this norm is honest).
  const double ud = (1.0 + cfg.delta) * (1.0 + cfg.delta);
  const auto resid_norm = [&](const std::vector<double>& pc,
                              std::vector<double>& F) -> double {
    const auto s = detail::even_op_samples(pc, initial.domain, cfg, mu + 1);
    if (!(s.a < -1e-6) || !(s.a > -1.0))
      throw NoConvergence("iterate left the renormalizable region (a = psi(1))");
    const auto g = detail::renorm_even(s, mu + 1);
    F.assign(static_cast<std::size_t>(mu + 1), 0.0);
    double nrm = 0.0, uk = 1.0;
    for (int k = 0; k <= mu; ++k) {
      F[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k)] -
                                       pc[static_cast<std::size_t>(k)];
      nrm += std::abs(F[static_cast<std::size_t>(k)]) * uk;
      uk *= ud;
    }
    return nrm;
  };

  std::vector<double> F;
  double rnorm = resid_norm(p, F);
  int iterations = 0;
  for (; iterations < 50 && rnorm > cfg.tol_newton; ++iterations) {
    const auto s = detail::even_op_samples(p, initial.domain, cfg, mu + 1);
    Eigen::MatrixXd J(mu, mu);
    std::vector<double> e(static_cast<std::size_t>(mu + 1), 0.0);
    for (int k = 1; k <= mu; ++k) {
      e[static_cast<std::size_t>(k)] = 1.0;
      const auto col = detail::d_renorm_even(s, e, mu + 1);
      e[static_cast<std::size_t>(k)] = 0.0;
      for (int j = 1; j <= mu; ++j)
        J(j - 1, k - 1) = col[static_cast<std::size_t>(j)] - (j == k ? 1.0 : 0.0);
    }
    Eigen::VectorXd rhs(mu);
    for (int j = 1; j <= mu; ++j) rhs(j - 1) = -F[static_cast<std::size_t>(j)];
    const Eigen::VectorXd step = J.partialPivLu().solve(rhs);

    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 12 && !improved; ++halving, lambda *= 0.5) {
      std::vector<double> trial = p;
      for (int k = 1; k <= mu; ++k) trial[static_cast<std::size_t>(k)] += lambda * step(k - 1);
      std::vector<double> Ft;
      double rt;
      try {
        rt = resid_norm(trial, Ft);
      } catch (const NoConvergence&) {
        continue;
      }
      if (rt < rnorm || rt <= cfg.tol_newton) {
        p = std::move(trial);
        F = std::move(Ft);
        rnorm = rt;
        improved = true;
      }
    }
    if (!improved) throw NoConvergence("Newton stalled: no damped step reduces the residual");
  }
  if (rnorm > cfg.tol_newton)
    throw NoConvergence("fixed-point Newton did not reach tol_newton in 50 iterations");

  FixedPointResult res;
  res.phi = detail::from_even_coeffs(p, initial.domain);
  res.a = detail::peval(p, 1.0);
  res.residual = renorm_residual_sup(res.phi, cfg);
  res.iterations = iterations;
  return res;
}

// ---------------------------------------------------------------------------
// Spectrum of the derivative at the fixed point

// Matrix of dR(phi) on span{u, u^2, ..., u^m} in the radius-scaled basis
// (u/rho)^k; that span is invariant because psi(0) = 1 is preserved by R.
inline Eigen::MatrixXd dr_matrix(const AnalyticMap1D& phi, const RenormConfig& cfg) {
  const auto p = detail::even_coeffs(phi, cfg.tol_residual);
  const int mu = cfg.n_x / 2;
  const auto s = detail::even_op_samples(p, phi.domain, cfg, mu + 1);
  const int m = static_cast<int>(s.u.size());

  Eigen::MatrixXd A(mu, mu);
  std::vector<cplx> qs(s.u.size());  // Q/rho powers, built incrementally
  for (std::size_t j = 0; j < qs.size(); ++j) qs[j] = cplx(1.0);
  std::vector<cplx> as(s.u.size(), cplx(1.0));  // (a^2 u / rho)^k = a^{2k} e^{ik phi}
  const double a2 = s.a * s.a;
  std::vector<cplx> vals(s.u.size());
  double bk = 1.0;  // e_k(1) = rho^{-k}
  for (int k = 1; k <= mu; ++k) {
    bk /= s.rho;
    for (int j = 0; j < m; ++j) {
      const double ang = two_pi * j / m;
      as[static_cast<std::size_t>(j)] *= a2 * cplx(std::cos(ang), std::sin(ang));
      qs[static_cast<std::size_t>(j)] *= s.q[static_cast<std::size_t>(j)] / s.rho;
      const std::size_t sj = static_cast<std::size_t>(j);
      vals[sj] = (2.0 / s.a) * s.pa2u[sj] * s.dpq[sj] * as[sj] + qs[sj] / s.a +
                 4.0 * bk * s.u[sj] * s.pa2u[sj] * s.dpq[sj] * s.dpa2u[sj] -
                 (bk / (s.a * s.a)) * s.pq[sj];
    }
    std::vector<cplx> buf = vals;
    fft_inplace(buf, -1);
    const double inv_m = 1.0 / m;
    // Scaled-basis coefficients are the raw DFT bins; row 0 must vanish since
    // the derivative preserves h(0) = 0.
    if (std::abs(buf[0]) * inv_m > 1e-6)
      throw IllConditioned("derivative leaked out of the normalized tangent space");
    for (int j = 1; j <= mu; ++j) A(j - 1, k - 1) = (buf[static_cast<std::size_t>(j)] * inv_m).real();
  }
  if (!A.allFinite() || A.cwiseAbs().maxCoeff() > 1e12)
    throw IllConditioned("derivative matrix is not numerically trustworthy");
  return A;
}

// Eigenvalues of dR(phi) on the normalized tangent space, by descending modulus.
inline std::vector<cplx> dr_spectrum(const AnalyticMap1D& phi, const RenormConfig& cfg) {
  if (renorm_residual_sup(phi, cfg) > 1e-8)
    throw DomainError("spectrum requested away from the fixed point");
  const Eigen::MatrixXd A = dr_matrix(phi, cfg);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw IllConditioned("eigensolver failed");
  std::vector<cplx> ev(static_cast<std::size_t>(A.rows()));
  for (int i = 0; i < A.rows(); ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return std::abs(x) > std::abs(y); });
  return ev;
}

}  // namespace qpr
