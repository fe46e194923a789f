#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/fft.hpp"

namespace qpr {

// Real-analytic 1-periodic function of theta, stored as Fourier coefficients
// c_{-K} .. c_{K} (ascending mode index). Hermitian symmetry c_{-k} = conj(c_k)
// keeps values real on the real axis.
struct PeriodicFn {
  std::vector<cplx> coeffs;  // size 2K+1, entry i holds mode i-K

  PeriodicFn() : coeffs(1, cplx(0.0)) {}
  explicit PeriodicFn(std::vector<cplx> c) : coeffs(std::move(c)) {
    if (coeffs.empty() || coeffs.size() % 2 == 0)
      throw DomainError("periodic coefficients must have odd length");
  }

  int max_mode() const { return (static_cast<int>(coeffs.size()) - 1) / 2; }

  cplx coeff(int k) const {
    const int K = max_mode();
    if (k < -K || k > K) return cplx(0.0);
    return coeffs[static_cast<std::size_t>(k + K)];
  }

  double eval(double theta) const {
    const int K = max_mode();
    double acc = coeff(0).real();
    for (int k = 1; k <= K; ++k) {
      const double ang = two_pi * k * theta;
      const cplx ck = coeff(k);
      acc += 2.0 * (ck.real() * std::cos(ang) - ck.imag() * std::sin(ang));
    }
    return acc;
  }

  double hermitian_defect() const {
    const int K = max_mode();
    double m = std::abs(coeff(0).imag());
    for (int k = 1; k <= K; ++k) m = std::max(m, std::abs(coeff(-k) - std::conj(coeff(k))));
    return m;
  }

  // Force exact hermitian symmetry (average the mirrored pair).
  void symmetrize() {
    const int K = max_mode();
    coeffs[static_cast<std::size_t>(K)] = cplx(coeff(0).real(), 0.0);
    for (int k = 1; k <= K; ++k) {
      const cplx avg = 0.5 * (coeff(k) + std::conj(coeff(-k)));
      coeffs[static_cast<std::size_t>(K + k)] = avg;
      coeffs[static_cast<std::size_t>(K - k)] = std::conj(avg);
    }
  }
};

// Build with modes 0..K given; negative modes filled by conjugation.
inline PeriodicFn periodic_from_half(const std::vector<cplx>& half) {
  const int K = static_cast<int>(half.size()) - 1;
  std::vector<cplx> full(static_cast<std::size_t>(2 * K + 1));
  full[static_cast<std::size_t>(K)] = cplx(half[0].real(), 0.0);
  for (int k = 1; k <= K; ++k) {
    full[static_cast<std::size_t>(K + k)] = half[static_cast<std::size_t>(k)];
    full[static_cast<std::size_t>(K - k)] = std::conj(half[static_cast<std::size_t>(k)]);
  }
  return PeriodicFn(std::move(full));
}

inline PeriodicFn periodic_constant(double v) { return PeriodicFn({cplx(v, 0.0)}); }

inline PeriodicFn derivative_theta(const PeriodicFn& g) {
  PeriodicFn h = g;
  const int K = h.max_mode();
  for (int k = -K; k <= K; ++k)
    h.coeffs[static_cast<std::size_t>(k + K)] *= cplx(0.0, two_pi * k);
  return h;
}

// h(theta) = g(theta - s).
inline PeriodicFn shift_theta(const PeriodicFn& g, double s) {
  PeriodicFn h = g;
  const int K = h.max_mode();
  for (int k = -K; k <= K; ++k) {
    const double ang = -two_pi * k * s;
    h.coeffs[static_cast<std::size_t>(k + K)] *= cplx(std::cos(ang), std::sin(ang));
  }
  return h;
}

inline PeriodicFn operator+(const PeriodicFn& a, const PeriodicFn& b) {
  const int K = std::max(a.max_mode(), b.max_mode());
  std::vector<cplx> c(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) c[static_cast<std::size_t>(k + K)] = a.coeff(k) + b.coeff(k);
  return PeriodicFn(std::move(c));
}

inline PeriodicFn operator*(double s, const PeriodicFn& a) {
  PeriodicFn h = a;
  for (auto& c : h.coeffs) c *= s;
  return h;
}

inline double norm_periodic(const PeriodicFn& g) {
  double s = 0.0;
  for (const auto& c : g.coeffs) s += std::abs(c);
  return s;
}

// Fit from uniform samples values[j] = g(j/n), n a power of two; keeps |k| <= K.
inline PeriodicFn fit_periodic(const std::vector<double>& values, int K) {
  std::vector<cplx> buf(values.begin(), values.end());
  fft_inplace(buf, -1);
  const int n = static_cast<int>(values.size());
  const double inv = 1.0 / n;
  K = std::min(K, n / 2 - 1);
  std::vector<cplx> full(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    const int bin = (k >= 0) ? k : n + k;
    full[static_cast<std::size_t>(k + K)] = buf[static_cast<std::size_t>(bin)] * inv;
  }
  PeriodicFn g(std::move(full));
  g.symmetrize();
  return g;
}

// ---------------------------------------------------------------------------
// Extrema over the circle

struct ExtremumResult {
  double theta = 0.0;
  double value = 0.0;
  bool degenerate = false;  // flat second derivative or a competing near-tie
};

namespace detail {

inline double wrap01(double t) {
  double r = std::fmod(t, 1.0);
  if (r < 0.0) r += 1.0;
  return r;
}

inline ExtremumResult locate_min(const PeriodicFn& g, const RenormConfig& cfg) {
  const int K = g.max_mode();
  const int n = static_cast<int>(next_pow2(static_cast<std::size_t>(std::max(1024, 8 * (K + 1)))));
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = g.eval(static_cast<double>(j) / n);
  int jbest = 0;
  for (int j = 1; j < n; ++j)
    if (v[static_cast<std::size_t>(j)] < v[static_cast<std::size_t>(jbest)]) jbest = j;

  // Newton polish on g' = 0, confined to the best grid cell's neighborhood.
  const PeriodicFn g1 = derivative_theta(g);
  const PeriodicFn g2 = derivative_theta(g1);
  double t = static_cast<double>(jbest) / n;
  const double cell = 1.0 / n;
  for (int it = 0; it < 40; ++it) {
    const double d1 = g1.eval(t);
    const double d2 = g2.eval(t);
    if (std::abs(d2) < 1e-14) break;
    double step = -d1 / d2;
    step = std::clamp(step, -2.0 * cell, 2.0 * cell);
    t = wrap01(t + step);
    if (std::abs(step) < 1e-15) break;
  }
  double val = g.eval(t);
  if (val > v[static_cast<std::size_t>(jbest)]) {  // polish wandered; keep the grid point
    t = static_cast<double>(jbest) / n;
    val = v[static_cast<std::size_t>(jbest)];
  }

  ExtremumResult res;
  res.theta = t;
  res.value = val;
  const double scale = std::max(1.0, norm_periodic(g));
  res.degenerate = std::abs(g2.eval(t)) < cfg.tol_degenerate * scale;
  // Competing minimum well away from theta*: degenerate extremum as well.
  for (int j = 0; j < n; ++j) {
    const double tj = static_cast<double>(j) / n;
    double d = std::abs(tj - t);
    d = std::min(d, 1.0 - d);
    if (d > 16.0 * cell && v[static_cast<std::size_t>(j)] - val < cfg.tol_residual * scale)
      res.degenerate = true;
  }
  return res;
}

}  // namespace detail

inline ExtremumResult min_theta(const PeriodicFn& g, const RenormConfig& cfg) {
  return detail::locate_min(g, cfg);
}

inline ExtremumResult max_theta(const PeriodicFn& g, const RenormConfig& cfg) {
  PeriodicFn neg = -1.0 * g;
  ExtremumResult r = detail::locate_min(neg, cfg);
  r.value = -r.value;
  return r;
}

// Derivative of the minimum operator at g0 in direction g1: evaluation of g1 at
// the unique non-degenerate minimizer of g0.
inline double dmin(const PeriodicFn& g0, const PeriodicFn& g1, const RenormConfig& cfg) {
  const ExtremumResult r = min_theta(g0, cfg);
  if (r.degenerate)
    throw DegenerateMinimum("minimum operator is not differentiable at this point");
  return g1.eval(r.theta);
}

}  // namespace qpr
