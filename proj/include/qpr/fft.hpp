#pragma once

#include <cassert>
#include <complex>
#include <numbers>
#include <vector>

namespace qpr {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 transform, sign = -1 forward / +1 inverse.
// Inverse is unnormalized; callers divide by n.
inline void fft_inplace(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  assert(is_pow2(n));
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * two_pi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline std::vector<cplx> fft(std::vector<cplx> a) {
  fft_inplace(a, -1);
  return a;
}

inline std::vector<cplx> ifft(std::vector<cplx> a) {
  fft_inplace(a, +1);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (auto& z : a) z *= inv;
  return a;
}

}  // namespace qpr
