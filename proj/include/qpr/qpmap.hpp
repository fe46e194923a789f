#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"

namespace qpr {

// Skew maps f(theta, x) = sum_{|k| <= K} c_k(x) e^{2 pi i k theta}, each mode
// c_k an analytic map of the common x-disc. Real-valuedness on real (theta, x)
// is the hermitian pairing c_{-k} = conj(c_k); helpers below measure and
// restore it but storage does not force it, so directional perturbations can
// be represented too.
struct QPMap {
  std::vector<ComplexMap1D> modes;  // ascending: c_{-K} ... c_{K}

  int max_mode() const { return (static_cast<int>(modes.size()) - 1) / 2; }

  const ComplexMap1D& mode(int k) const {
    const int K = max_mode();
    if (modes.empty() || k < -K || k > K) throw ModeOutOfRange("mode index out of range");
    return modes[static_cast<std::size_t>(k + K)];
  }
  ComplexMap1D& mode(int k) {
    const int K = max_mode();
    if (modes.empty() || k < -K || k > K) throw ModeOutOfRange("mode index out of range");
    return modes[static_cast<std::size_t>(k + K)];
  }

  const DiscDomain& domain() const {
    if (modes.empty()) throw DomainError("empty quasi-periodic map");
    return modes[static_cast<std::size_t>(max_mode())].domain;
  }
};

inline ComplexMap1D conj_series(const ComplexMap1D& f) {
  ComplexMap1D g;
  g.domain = f.domain;
  g.coeffs.resize(f.coeffs.size());
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) g.coeffs[i] = std::conj(f.coeffs[i]);
  return g;
}

inline ComplexMap1D complexify(const AnalyticMap1D& f) {
  ComplexMap1D g;
  g.domain = f.domain;
  g.coeffs.assign(f.coeffs.begin(), f.coeffs.end());
  return g;
}

inline ComplexMap1D zero_series(const DiscDomain& d) {
  ComplexMap1D g;
  g.domain = d;
  g.coeffs.assign(1, cplx(0.0));
  return g;
}

// theta-independent embedding: mode 0 carries psi, all others vanish.
inline QPMap qp_uncoupled(const AnalyticMap1D& psi, int K) {
  QPMap f;
  f.modes.assign(static_cast<std::size_t>(2 * K + 1), zero_series(psi.domain));
  f.modes[static_cast<std::size_t>(K)] = complexify(psi);
  return f;
}

// Grow the mode table to hold modes up to K (no-op if already large enough).
inline QPMap qp_pad_modes(const QPMap& f, int K) {
  const int K0 = f.max_mode();
  if (K <= K0) return f;
  QPMap g;
  g.modes.assign(static_cast<std::size_t>(2 * K + 1), zero_series(f.domain()));
  for (int k = -K0; k <= K0; ++k) g.modes[static_cast<std::size_t>(k + K)] = f.mode(k);
  return g;
}

// Install the real pair u(x) cos(2 pi k theta) + v(x) sin(2 pi k theta):
// c_k = (u - i v)/2 and c_{-k} = (u + i v)/2.
inline void qp_set_mode_pair(QPMap& f, int k, const AnalyticMap1D& u, const AnalyticMap1D& v) {
  if (k <= 0) throw ModeOutOfRange("pair index must be positive");
  const std::size_t n = std::max(u.coeffs.size(), v.coeffs.size());
  ComplexMap1D cp, cm;
  cp.domain = u.domain;
  cm.domain = u.domain;
  cp.coeffs.assign(n, cplx(0.0));
  cm.coeffs.assign(n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double ur = i < u.coeffs.size() ? u.coeffs[i] : 0.0;
    const double vr = i < v.coeffs.size() ? v.coeffs[i] : 0.0;
    cp.coeffs[i] = cplx(0.5 * ur, -0.5 * vr);
    cm.coeffs[i] = cplx(0.5 * ur, 0.5 * vr);
  }
  f.mode(k) = std::move(cp);
  f.mode(-k) = std::move(cm);
}

inline cplx qp_eval(const QPMap& f, double theta, cplx z, double tol = 1e-9) {
  const int K = f.max_mode();
  cplx acc(0.0);
  for (int k = -K; k <= K; ++k) {
    const ComplexMap1D& c = f.mode(k);
    if (c.coeffs.size() == 1 && c.coeffs[0] == cplx(0.0)) continue;
    const double ang = two_pi * k * theta;
    acc += eval_1d(c, z, tol) * cplx(std::cos(ang), std::sin(ang));
  }
  return acc;
}

inline double qp_eval_real(const QPMap& f, double theta, double x, double tol = 1e-9) {
  const cplx v = qp_eval(f, theta, cplx(x), tol);
  return v.real();
}

// d/dx, mode by mode.
inline QPMap qp_deriv_x(const QPMap& f) {
  QPMap g;
  g.modes.reserve(f.modes.size());
  for (const auto& c : f.modes) g.modes.push_back(derivative_1d(c));
  return g;
}

// Mode 0 as a real map; the discarded imaginary part must be noise.
inline AnalyticMap1D qp_p0(const QPMap& f, double tol = 1e-8) {
  const ComplexMap1D& c0 = f.mode(0);
  AnalyticMap1D p;
  p.domain = c0.domain;
  p.coeffs.resize(c0.coeffs.size());
  double scale = 1.0, imag = 0.0;
  for (std::size_t i = 0; i < c0.coeffs.size(); ++i) {
    p.coeffs[i] = c0.coeffs[i].real();
    scale = std::max(scale, std::abs(c0.coeffs[i]));
    imag = std::max(imag, std::abs(c0.coeffs[i].imag()));
  }
  if (imag > tol * scale) throw DomainError("average of the map is not real");
  return p;
}

// Theta-average of f(., 1): the rescaling constant of the doubling operator.
inline double qp_hat_a(const QPMap& f) {
  const cplx a = eval_1d(f.mode(0), cplx(1.0));
  if (std::abs(a.imag()) > 1e-8 * std::max(1.0, std::abs(a)))
    throw DomainError("rescaling constant came out non-real");
  return a.real();
}

inline double qp_norm(const QPMap& f) {
  double s = 0.0;
  for (const auto& c : f.modes) s += norm_disc(c);
  return s;
}

// max_k || c_{-k} - conj(c_k) || : zero for maps real on real arguments.
inline double qp_hermitian_defect(const QPMap& f) {
  const int K = f.max_mode();
  double worst = 0.0;
  for (int k = 0; k <= K; ++k) {
    const ComplexMap1D& cp = f.mode(k);
    const ComplexMap1D& cm = f.mode(-k);
    const std::size_t n = std::max(cp.coeffs.size(), cm.coeffs.size());
    double s = 0.0, rk = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx a = i < cm.coeffs.size() ? cm.coeffs[i] : cplx(0.0);
      const cplx b = i < cp.coeffs.size() ? std::conj(cp.coeffs[i]) : cplx(0.0);
      s += std::abs(a - b) * rk;
      rk *= cp.domain.radius;
    }
    worst = std::max(worst, s);
  }
  return worst;
}

inline QPMap qp_symmetrize(const QPMap& f) {
  const int K = f.max_mode();
  QPMap g = f;
  for (int k = 0; k <= K; ++k) {
    const ComplexMap1D cp = f.mode(k);
    const ComplexMap1D cm = f.mode(-k);
    const std::size_t n = std::max(cp.coeffs.size(), cm.coeffs.size());
    ComplexMap1D hp;
    hp.domain = cp.domain;
    hp.coeffs.assign(n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const cplx a = i < cp.coeffs.size() ? cp.coeffs[i] : cplx(0.0);
      const cplx b = i < cm.coeffs.size() ? std::conj(cm.coeffs[i]) : cplx(0.0);
      hp.coeffs[i] = 0.5 * (a + b);
    }
    g.mode(k) = hp;
    if (k > 0) g.mode(-k) = conj_series(hp);
  }
  return g;
}

}  // namespace qpr
