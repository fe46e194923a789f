#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/fft.hpp"

namespace qpr {

// Fraction of the domain radius used as the sampling circle for refits.
inline constexpr double kFitFraction = 0.9;
// Refitted coefficients larger than this signal a blown-up composition.
inline constexpr double kOverflowGuard = 1e8;

// Finite Taylor series about domain.center: f(z) = sum coeffs[k] (z - center)^k.
// The disc is the validity region the map claims; operations sample on the
// circle of radius kFitFraction * radius and stay exact for polynomial data
// up to aliasing of degree >= m_nodes.
template <class Scalar>
struct Series {
  DiscDomain domain;
  std::vector<Scalar> coeffs;

  Series() = default;
  Series(DiscDomain d, std::vector<Scalar> c) : domain(d), coeffs(std::move(c)) {}

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

using AnalyticMap1D = Series<double>;
using ComplexMap1D = Series<cplx>;

namespace detail {

// Unchecked Horner evaluation.
template <class Scalar>
inline cplx horner(const Series<Scalar>& f, cplx z) {
  const cplx w = z - cplx(f.domain.center);
  cplx acc(0.0);
  for (std::size_t i = f.coeffs.size(); i-- > 0;) acc = acc * w + cplx(f.coeffs[i]);
  return acc;
}

inline double horner_real(const AnalyticMap1D& f, double x) {
  const double w = x - f.domain.center;
  double acc = 0.0;
  for (std::size_t i = f.coeffs.size(); i-- > 0;) acc = acc * w + f.coeffs[i];
  return acc;
}

// Taylor coefficients from equispaced samples on |z - center| = rho.
// samples[j] = F(center + rho * e^{2 pi i j / m}), m a power of two.
inline std::vector<cplx> coeffs_from_circle(std::vector<cplx> samples, double rho, int n_keep) {
  fft_inplace(samples, -1);
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  std::vector<cplx> out(static_cast<std::size_t>(n_keep));
  double scale = inv_m;
  for (int k = 0; k < n_keep; ++k) {
    out[static_cast<std::size_t>(k)] = samples[static_cast<std::size_t>(k)] * scale;
    scale /= rho;
  }
  for (const cplx& c : out)
    if (!(std::abs(c) < kOverflowGuard))
      throw IllConditioned("refit produced non-finite or oversized coefficients");
  return out;
}

// Nodes of the sampling circle about d.center with radius rho.
inline std::vector<cplx> circle_nodes(const DiscDomain& d, double rho, int m) {
  std::vector<cplx> z(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double ang = two_pi * j / m;
    z[static_cast<std::size_t>(j)] = cplx(d.center + rho * std::cos(ang), rho * std::sin(ang));
  }
  return z;
}

inline int effective_nodes(int m_nodes, int n_out) {
  return static_cast<int>(next_pow2(static_cast<std::size_t>(std::max(m_nodes, 2 * n_out + 2))));
}

inline std::vector<double> real_parts(const std::vector<cplx>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Evaluation

template <class Scalar>
inline cplx eval_1d(const Series<Scalar>& f, cplx z, double tol = 1e-9) {
  if (std::abs(z - cplx(f.domain.center)) > f.domain.radius + tol)
    throw DomainEscape("evaluation point outside the domain disc");
  return detail::horner(f, z);
}

inline double eval_1d(const AnalyticMap1D& f, double x, double tol = 1e-9) {
  if (std::abs(x - f.domain.center) > f.domain.radius + tol)
    throw DomainEscape("evaluation point outside the domain disc");
  return detail::horner_real(f, x);
}

// ---------------------------------------------------------------------------
// Derivative: exact coefficient shift, same domain.

template <class Scalar>
inline Series<Scalar> derivative_1d(const Series<Scalar>& f) {
  Series<Scalar> g;
  g.domain = f.domain;
  if (f.coeffs.size() <= 1) {
    g.coeffs.assign(1, Scalar(0));
    return g;
  }
  g.coeffs.resize(f.coeffs.size() - 1);
  for (std::size_t k = 1; k < f.coeffs.size(); ++k)
    g.coeffs[k - 1] = f.coeffs[k] * static_cast<double>(k);
  return g;
}

// ---------------------------------------------------------------------------
// Norms

// Upper bound for sup |f| on the closed disc: sum |c_k| r^k.
template <class Scalar>
inline double norm_disc(const Series<Scalar>& f) {
  double s = 0.0, rk = 1.0;
  for (const Scalar& c : f.coeffs) {
    s += std::abs(c) * rk;
    rk *= f.domain.radius;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Refit-based operations

// h(z) = f(a z) on the same domain. Requires the scaled sampling circle to stay
// inside the domain disc.
template <class Scalar>
inline Series<Scalar> scale_arg(const Series<Scalar>& f, double a, const RenormConfig& cfg) {
  if (std::abs(a) > 1.0 + cfg.tol_residual)
    throw DomainEscape("scale factor must satisfy |a| <= 1");
  const double rho = kFitFraction * f.domain.radius;
  const int m = detail::effective_nodes(cfg.m_nodes, f.degree());
  const auto z = detail::circle_nodes(f.domain, rho, m);
  std::vector<cplx> vals(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const cplx az = a * z[j];
    if (std::abs(az - cplx(f.domain.center)) > f.domain.radius + cfg.tol_residual)
      throw DomainEscape("scaled circle leaves the domain disc");
    vals[j] = detail::horner(f, az);
  }
  auto ck = detail::coeffs_from_circle(std::move(vals), rho, f.degree() + 1);
  Series<Scalar> h;
  h.domain = f.domain;
  if constexpr (std::is_same_v<Scalar, double>) {
    h.coeffs = detail::real_parts(ck);
  } else {
    h.coeffs = std::move(ck);
  }
  return h;
}

// f composed with g, refit about g's center; the result lives on g's domain.
// Samples of g on its fit circle must land in f's disc.
template <class Scalar>
inline Series<Scalar> compose_1d(const Series<Scalar>& f, const Series<Scalar>& g,
                                 const RenormConfig& cfg) {
  const int n_out = cfg.n_x;
  const double rho = kFitFraction * g.domain.radius;
  const int m = detail::effective_nodes(cfg.m_nodes, n_out);
  const auto z = detail::circle_nodes(g.domain, rho, m);
  std::vector<cplx> vals(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const cplx w = detail::horner(g, z[j]);
    if (std::abs(w - cplx(f.domain.center)) > f.domain.radius + cfg.tol_residual)
      throw ImageEscape("inner map leaves the outer map's disc");
    vals[j] = detail::horner(f, w);
  }
  auto ck = detail::coeffs_from_circle(std::move(vals), rho, n_out + 1);
  Series<Scalar> h;
  h.domain = g.domain;
  if constexpr (std::is_same_v<Scalar, double>) {
    h.coeffs = detail::real_parts(ck);
  } else {
    h.coeffs = std::move(ck);
  }
  return h;
}

// Exact polynomial recentering (Taylor shift by synthetic division).
template <class Scalar>
inline Series<Scalar> recenter(const Series<Scalar>& f, const DiscDomain& target) {
  const double shift = target.center - f.domain.center;
  std::vector<Scalar> c = f.coeffs;
  if (c.empty()) c.assign(1, Scalar(0));
  const std::size_t n = c.size();
  // Repeated synthetic division by (w - shift): after pass k, c[k] is the
  // k-th coefficient about the new center.
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = n - 1; i > k; --i) c[i - 1] += c[i] * shift;
  Series<Scalar> g;
  g.domain = target;
  g.coeffs = std::move(c);
  return g;
}

// Largest absolute odd coefficient; zero for even maps centered at 0.
inline double odd_part_norm(const AnalyticMap1D& f) {
  double m = 0.0;
  for (std::size_t k = 1; k < f.coeffs.size(); k += 2) m = std::max(m, std::abs(f.coeffs[k]));
  return m;
}

}  // namespace qpr
