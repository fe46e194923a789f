#pragma once

#include <cmath>
#include <string>

#include "qpr/errors.hpp"

namespace qpr {

struct DiscDomain {
  double center = 0.2;  // 1/5: asymmetric so the disc holds the image of its own scaled copy
  double radius = 1.5;
};

// Numerical parameters shared across the toolkit.
//   delta:   half-width margin of the invariant interval I_delta = [-1-delta, 1+delta]
//   disc:    complex disc W used by the quasi-periodic operators
//   n_x:     Taylor truncation degree in x (even)
//   k_theta: Fourier truncation in theta
//   m_nodes: sampling nodes per refit circle
//   k0:      Lyapunov threshold for "attracting enough" invariant curves
//   omega:   default rotation number (golden mean)
struct RenormConfig {
  double delta = 0.1;
  DiscDomain disc;
  int n_x = 60;
  int k_theta = 16;
  int m_nodes = 256;
  double tol_newton = 1e-12;
  double tol_residual = 1e-10;
  double tol_degenerate = 1e-8;
  double k0 = 1e-3;
  double omega = 0.6180339887498949;  // (sqrt(5)-1)/2

  void validate() const {
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(disc.radius > 0.0)) throw ConfigError("disc radius must be positive");
    if (n_x < 4) throw ConfigError("n_x must be >= 4");
    if (n_x % 2 != 0) throw ConfigError("n_x must be even");
    if (k_theta < 1) throw ConfigError("k_theta must be >= 1");
    if (m_nodes < 2 * n_x + 1) throw ConfigError("m_nodes must be >= 2*n_x+1");
    if (!(tol_newton > 0.0)) throw ConfigError("tol_newton must be positive");
    if (!(tol_residual > 0.0)) throw ConfigError("tol_residual must be positive");
    if (!(tol_degenerate > 0.0)) throw ConfigError("tol_degenerate must be positive");
    if (!(k0 > 0.0)) throw ConfigError("k0 must be positive");
    if (!(omega >= 0.0 && omega < 1.0)) throw ConfigError("omega must lie in [0,1)");
    // I_delta must fit inside the disc, with the margin used by range checks.
    const double right = std::abs(1.0 + delta - disc.center);
    const double left = std::abs(-1.0 - delta - disc.center);
    if (std::max(left, right) > disc.radius)
      throw ConfigError("interval [-1-delta, 1+delta] must lie inside the disc");
  }
};

}  // namespace qpr
