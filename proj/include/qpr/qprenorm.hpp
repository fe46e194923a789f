#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/qpmap.hpp"

namespace qpr {

// Doubling operator for quasi-periodically forced maps driven by theta -> 2 theta:
//   T(f)(theta, x) = (1/a) f(theta + omega, f(theta, a x)),  a = <f(., 1)>.
// The drive frequency doubles alongside, so a full step is (omega, f) ->
// (2 omega mod 1, T_omega f); this file implements the fiber map and its
// linearization, plus the Fourier-mode blocks of that linearization at an
// unforced map.

namespace detail {

// Values of every mode polynomial at one fixed x-argument per circle node.
inline std::vector<std::vector<cplx>> mode_values_at(const QPMap& f,
                                                     const std::vector<cplx>& args) {
  const int K = f.max_mode();
  std::vector<std::vector<cplx>> out(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    auto& row = out[static_cast<std::size_t>(k + K)];
    row.resize(args.size());
    const ComplexMap1D& c = f.mode(k);
    for (std::size_t l = 0; l < args.size(); ++l) row[l] = horner(c, args[l]);
  }
  return out;
}

// sum_k vals[k][l] e^{2 pi i k theta}
inline cplx combine_modes(const std::vector<std::vector<cplx>>& vals, std::size_t l,
                          double theta) {
  const int K = (static_cast<int>(vals.size()) - 1) / 2;
  cplx acc = vals[static_cast<std::size_t>(K)][l];
  const cplx w = std::polar(1.0, two_pi * theta);
  cplx wp = 1.0, wm = 1.0;
  for (int k = 1; k <= K; ++k) {
    wp *= w;
    wm /= w;
    acc += vals[static_cast<std::size_t>(K + k)][l] * wp +
           vals[static_cast<std::size_t>(K - k)][l] * wm;
  }
  return acc;
}

inline cplx qp_value_full(const QPMap& f, double theta, cplx z) {
  const int K = f.max_mode();
  cplx acc(0.0);
  const cplx w = std::polar(1.0, two_pi * theta);
  cplx wp = 1.0, wm = 1.0;
  acc = horner(f.mode(0), z);
  for (int k = 1; k <= K; ++k) {
    wp *= w;
    wm /= w;
    acc += horner(f.mode(k), z) * wp + horner(f.mode(-k), z) * wm;
  }
  return acc;
}

inline int theta_nodes(int k_in, int k_out, int n_x) {
  const int alias = 2 * k_in * (n_x + 1) + 4;
  const int want = std::max({4 * (k_out + 1), alias, 64});
  return static_cast<int>(next_pow2(static_cast<std::size_t>(want)));
}

// 2-D refit: vals[j*m + l] on the theta grid x the x-circle -> mode table.
inline QPMap fit_qp(std::vector<cplx> vals, int n_t, int m, const DiscDomain& dom, double rho,
                    int k_out, int n_keep) {
  // theta transform, one column per circle node
  std::vector<cplx> buf(static_cast<std::size_t>(n_t));
  for (int l = 0; l < m; ++l) {
    for (int j = 0; j < n_t; ++j)
      buf[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(j) * m + l];
    fft_inplace(buf, -1);
    for (int j = 0; j < n_t; ++j)
      vals[static_cast<std::size_t>(j) * m + l] =
          buf[static_cast<std::size_t>(j)] / static_cast<double>(n_t);
  }
  QPMap g;
  g.modes.assign(static_cast<std::size_t>(2 * k_out + 1), zero_series(dom));
  std::vector<cplx> row(static_cast<std::size_t>(m));
  for (int k = -k_out; k <= k_out; ++k) {
    const int bin = k >= 0 ? k : n_t + k;
    for (int l = 0; l < m; ++l) row[static_cast<std::size_t>(l)] =
        vals[static_cast<std::size_t>(bin) * m + l];
    ComplexMap1D c;
    c.domain = dom;
    c.coeffs = coeffs_from_circle(row, rho, n_keep);
    g.modes[static_cast<std::size_t>(k + k_out)] = std::move(c);
  }
  return g;
}

}  // namespace detail

inline double qp_rescale_or_throw(const QPMap& f, const RenormConfig& cfg) {
  const double a = qp_hat_a(f);
  if (!(a < -cfg.tol_residual) || !(a > -1.0 + cfg.tol_residual))
    throw NotInX("average rescaling <f(.,1)> must lie inside (-1, 0)");
  return a;
}

inline QPMap qp_renorm(const QPMap& f, double omega, const RenormConfig& cfg) {
  const DiscDomain dom = f.domain();
  const double a = qp_rescale_or_throw(f, cfg);
  int n_deg = 0;
  for (const auto& c : f.modes) n_deg = std::max(n_deg, c.degree());
  const int n_t = detail::theta_nodes(f.max_mode(), cfg.k_theta, n_deg);
  const double rho = kFitFraction * dom.radius;
  const int m = detail::effective_nodes(cfg.m_nodes, cfg.n_x);
  const auto z = detail::circle_nodes(dom, rho, m);

  std::vector<cplx> az(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) az[l] = a * z[l];
  const auto inner_modes = detail::mode_values_at(f, az);

  std::vector<cplx> vals(static_cast<std::size_t>(n_t) * z.size());
  for (int j = 0; j < n_t; ++j) {
    const double th = static_cast<double>(j) / n_t;
    for (std::size_t l = 0; l < z.size(); ++l) {
      const cplx y = detail::combine_modes(inner_modes, l, th);
      if (std::abs(y - cplx(dom.center)) > dom.radius + cfg.tol_residual * 1e2)
        throw ImageEscape("inner composition leaves the x-disc");
      vals[static_cast<std::size_t>(j) * z.size() + l] =
          detail::qp_value_full(f, th + omega, y) / a;
    }
  }
  return detail::fit_qp(std::move(vals), n_t, m, dom, rho, cfg.k_theta, cfg.n_x + 1);
}

// Directional derivative of T_omega at f in direction h:
//   dT(f)h = (1/a)[ h(t+w, F) + D_x f(t+w, F) (h(t, ax) + b x D_x f(t, ax)) ]
//          - (b/a^2) f(t+w, F),   F = f(t, ax),  b = <h(., 1)>.
inline QPMap d_qp_renorm(const QPMap& f, const QPMap& h, double omega,
                         const RenormConfig& cfg) {
  const DiscDomain dom = f.domain();
  const double a = qp_rescale_or_throw(f, cfg);
  const cplx b = eval_1d(h.mode(0), cplx(1.0));
  const QPMap df = qp_deriv_x(f);

  int n_deg = 0;
  for (const auto& c : f.modes) n_deg = std::max(n_deg, c.degree());
  for (const auto& c : h.modes) n_deg = std::max(n_deg, c.degree());
  const int n_t = detail::theta_nodes(std::max(f.max_mode(), h.max_mode()), cfg.k_theta, n_deg);
  const double rho = kFitFraction * dom.radius;
  const int m = detail::effective_nodes(cfg.m_nodes, cfg.n_x);
  const auto z = detail::circle_nodes(dom, rho, m);

  std::vector<cplx> az(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) az[l] = a * z[l];
  const auto f_in = detail::mode_values_at(f, az);
  const auto df_in = detail::mode_values_at(df, az);
  const auto h_in = detail::mode_values_at(h, az);

  std::vector<cplx> vals(static_cast<std::size_t>(n_t) * z.size());
  for (int j = 0; j < n_t; ++j) {
    const double th = static_cast<double>(j) / n_t;
    for (std::size_t l = 0; l < z.size(); ++l) {
      const cplx F = detail::combine_modes(f_in, l, th);
      if (std::abs(F - cplx(dom.center)) > dom.radius + cfg.tol_residual * 1e2)
        throw ImageEscape("inner composition leaves the x-disc");
      const cplx dfF = detail::qp_value_full(df, th + omega, F);
      const cplx hF = detail::qp_value_full(h, th + omega, F);
      const cplx fF = detail::qp_value_full(f, th + omega, F);
      const cplx hin = detail::combine_modes(h_in, l, th);
      const cplx dfin = detail::combine_modes(df_in, l, th);
      vals[static_cast<std::size_t>(j) * z.size() + l] =
          (hF + dfF * (hin + b * z[l] * dfin)) / a - (b / (a * a)) * fF;
    }
  }
  return detail::fit_qp(std::move(vals), n_t, m, dom, rho, cfg.k_theta, cfg.n_x + 1);
}

// One full renormalization step of the pair (omega, f).
inline std::pair<double, QPMap> renorm_pair(const QPMap& f, double omega,
                                            const RenormConfig& cfg) {
  return {std::fmod(2.0 * omega, 1.0), qp_renorm(f, omega, cfg)};
}

// ---------------------------------------------------------------------------
// Fourier-mode blocks of dT at an unforced map psi.
//
// On the k-th mode the linearization acts as c -> L1 c + e^{2 pi i k omega} L2 c,
//   L1 g = (1/a) psi'(psi(a .)) g(a .),   L2 g = (1/a) g(psi(a .)),
// so the real pair (u, v) with u cos + v sin = mode k picks up the rotation
// block [[L1 + cos L2, sin L2], [-sin L2, L1 + cos L2]] at angle 2 pi k omega.

// Operator L1 and L2 applied to one series g living on the same disc family.
inline ComplexMap1D l1_apply(const AnalyticMap1D& psi, const ComplexMap1D& g,
                             const RenormConfig& cfg) {
  const double a = detail::horner_real(psi, 1.0);
  const AnalyticMap1D dpsi = derivative_1d(psi);
  const double rho = kFitFraction * g.domain.radius;
  const int n_out = std::max(cfg.n_x, g.degree());
  const int m = detail::effective_nodes(cfg.m_nodes, n_out);
  const auto z = detail::circle_nodes(g.domain, rho, m);
  std::vector<cplx> vals(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) {
    const cplx az = a * z[l];
    vals[l] = detail::horner(dpsi, detail::horner(psi, az)) * detail::horner(g, az) / a;
  }
  ComplexMap1D out;
  out.domain = g.domain;
  out.coeffs = detail::coeffs_from_circle(std::move(vals), rho, n_out + 1);
  return out;
}

inline ComplexMap1D l2_apply(const AnalyticMap1D& psi, const ComplexMap1D& g,
                             const RenormConfig& cfg) {
  const double a = detail::horner_real(psi, 1.0);
  const double rho = kFitFraction * g.domain.radius;
  const int n_out = std::max(cfg.n_x, g.degree());
  const int m = detail::effective_nodes(cfg.m_nodes, n_out);
  const auto z = detail::circle_nodes(g.domain, rho, m);
  std::vector<cplx> vals(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) {
    const cplx pz = detail::horner(psi, a * z[l]);
    if (std::abs(pz - cplx(g.domain.center)) > g.domain.radius + cfg.tol_residual * 1e2)
      throw ImageEscape("psi(a z) leaves the disc the series lives on");
    vals[l] = detail::horner(g, pz) / a;
  }
  ComplexMap1D out;
  out.domain = g.domain;
  out.coeffs = detail::coeffs_from_circle(std::move(vals), rho, n_out + 1);
  return out;
}

// Complex single-mode action c -> L1 c + e^{i phi} L2 c.
inline ComplexMap1D l_mode_apply(const AnalyticMap1D& psi, const ComplexMap1D& c, double phi,
                                 const RenormConfig& cfg) {
  ComplexMap1D r1 = l1_apply(psi, c, cfg);
  const ComplexMap1D r2 = l2_apply(psi, c, cfg);
  const cplx w = std::polar(1.0, phi);
  if (r1.coeffs.size() < r2.coeffs.size()) r1.coeffs.resize(r2.coeffs.size(), cplx(0.0));
  for (std::size_t i = 0; i < r2.coeffs.size(); ++i) r1.coeffs[i] += w * r2.coeffs[i];
  return r1;
}

// Real pair form of the same action at rotation angle phi.
struct ModePair {
  AnalyticMap1D u, v;
};

inline ModePair l_pair_apply(const AnalyticMap1D& psi, const ModePair& p, double phi,
                             const RenormConfig& cfg) {
  const auto real_of = [](const ComplexMap1D& c) {
    AnalyticMap1D r;
    r.domain = c.domain;
    r.coeffs = detail::real_parts(c.coeffs);
    return r;
  };
  const ComplexMap1D l1u = l1_apply(psi, complexify(p.u), cfg);
  const ComplexMap1D l2u = l2_apply(psi, complexify(p.u), cfg);
  const ComplexMap1D l1v = l1_apply(psi, complexify(p.v), cfg);
  const ComplexMap1D l2v = l2_apply(psi, complexify(p.v), cfg);
  const double c = std::cos(phi), s = std::sin(phi);
  ModePair out;
  out.u = real_of(l1u);
  out.v = real_of(l1v);
  const auto add = [](AnalyticMap1D& dst, double w, const ComplexMap1D& src) {
    if (dst.coeffs.size() < src.coeffs.size()) dst.coeffs.resize(src.coeffs.size(), 0.0);
    for (std::size_t i = 0; i < src.coeffs.size(); ++i) dst.coeffs[i] += w * src.coeffs[i].real();
  };
  add(out.u, c, l2u);
  add(out.u, s, l2v);
  add(out.v, -s, l2u);
  add(out.v, c, l2v);
  return out;
}

// Matrices of L1 and L2 on the scaled power basis ((z - c)/rho)^j of the disc.
struct FourierBlocks {
  Eigen::MatrixXd l1, l2;
  DiscDomain domain;
  double a = 0.0;
};

inline FourierBlocks l_blocks(const AnalyticMap1D& psi, const RenormConfig& cfg) {
  FourierBlocks fb;
  fb.domain = cfg.disc;
  fb.a = detail::horner_real(psi, 1.0);
  if (!(fb.a < -1e-8)) throw NotRenormalizable("psi(1) must be negative");
  const AnalyticMap1D dpsi = derivative_1d(psi);
  const int n = cfg.n_x + 1;
  const double rho = kFitFraction * cfg.disc.radius;
  const int m = detail::effective_nodes(cfg.m_nodes, cfg.n_x);
  const auto z = detail::circle_nodes(cfg.disc, rho, m);

  std::vector<cplx> w1(z.size()), w2(z.size()), fac1(z.size()), pw1(z.size(), cplx(1.0)),
      pw2(z.size(), cplx(1.0));
  for (std::size_t l = 0; l < z.size(); ++l) {
    const cplx az = fb.a * z[l];
    const cplx pz = detail::horner(psi, az);
    if (std::abs(pz - cplx(cfg.disc.center)) > cfg.disc.radius + cfg.tol_residual * 1e2)
      throw ImageEscape("psi(a z) leaves the block disc");
    w1[l] = (az - cplx(cfg.disc.center)) / rho;
    w2[l] = (pz - cplx(cfg.disc.center)) / rho;
    fac1[l] = detail::horner(dpsi, pz) / fb.a;
  }

  fb.l1.resize(n, n);
  fb.l2.resize(n, n);
  std::vector<cplx> buf(z.size());
  for (int j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < z.size(); ++l) buf[l] = fac1[l] * pw1[l];
    auto c1 = detail::coeffs_from_circle(buf, 1.0, n);  // rho = 1: scaled basis bins
    for (std::size_t l = 0; l < z.size(); ++l) buf[l] = pw2[l] / fb.a;
    auto c2 = detail::coeffs_from_circle(buf, 1.0, n);
    for (int i = 0; i < n; ++i) {
      fb.l1(i, j) = c1[static_cast<std::size_t>(i)].real();
      fb.l2(i, j) = c2[static_cast<std::size_t>(i)].real();
    }
    for (std::size_t l = 0; l < z.size(); ++l) {
      pw1[l] *= w1[l];
      pw2[l] *= w2[l];
    }
  }
  if (!fb.l1.allFinite() || !fb.l2.allFinite())
    throw IllConditioned("mode block assembly produced non-finite entries");
  return fb;
}

// Rotation gamma acting on stacked pairs: [[cos, sin], [-sin, cos]] (x) I_n.
inline Eigen::MatrixXd r_gamma_matrix(int n, double gamma) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const double c = std::cos(gamma), s = std::sin(gamma);
  for (int i = 0; i < n; ++i) {
    r(i, i) = c;
    r(i, n + i) = s;
    r(n + i, i) = -s;
    r(n + i, n + i) = c;
  }
  return r;
}

inline Eigen::MatrixXd l_omega_block(const FourierBlocks& fb, double phi) {
  const int n = static_cast<int>(fb.l1.rows());
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::MatrixXd b(2 * n, 2 * n);
  b.topLeftCorner(n, n) = fb.l1 + c * fb.l2;
  b.topRightCorner(n, n) = s * fb.l2;
  b.bottomLeftCorner(n, n) = -s * fb.l2;
  b.bottomRightCorner(n, n) = fb.l1 + c * fb.l2;
  return b;
}

inline std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXd& b) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) throw IllConditioned("eigensolver failed");
  std::vector<cplx> ev(static_cast<std::size_t>(b.rows()));
  for (int i = 0; i < b.rows(); ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return ev;
}

// Spectrum of the mode-k block of dT at unforced psi, rotation number omega.
inline std::vector<cplx> l_omega_spectrum(const AnalyticMap1D& psi, double omega, int k,
                                          const RenormConfig& cfg) {
  if (k <= 0) throw ModeOutOfRange("mode index must be positive");
  const FourierBlocks fb = l_blocks(psi, cfg);
  return sorted_eigenvalues(l_omega_block(fb, two_pi * k * omega));
}

// Reorder each row after the first so eigenvalue j continues the curve started
// by eigenvalue j of the previous row (greedy nearest-neighbour matching).
inline void order_continuously(std::vector<std::vector<cplx>>& rows) {
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& prev = rows[r - 1];
    auto& cur = rows[r];
    const std::size_t n = std::min(prev.size(), cur.size());
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t best = j;
      double bd = std::abs(cur[j] - prev[j]);
      for (std::size_t i = j + 1; i < cur.size(); ++i) {
        const double d = std::abs(cur[i] - prev[j]);
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      std::swap(cur[j], cur[best]);
    }
  }
}

// Largest |f(theta, z)| - style image bound: sup over the theta grid and the
// disc boundary of |f(theta, z) - center|.
inline double qp_image_radius(const QPMap& f, int n_theta = 64, int n_boundary = 512) {
  const DiscDomain dom = f.domain();
  double worst = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    const double th = static_cast<double>(j) / n_theta;
    for (int l = 0; l < n_boundary; ++l) {
      const double ang = two_pi * l / n_boundary;
      const cplx z = cplx(dom.center) + dom.radius * cplx(std::cos(ang), std::sin(ang));
      worst = std::max(worst, std::abs(detail::qp_value_full(f, th, z) - cplx(dom.center)));
    }
  }
  return worst;
}

}  // namespace qpr
