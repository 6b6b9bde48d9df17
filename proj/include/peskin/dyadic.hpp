#pragma once

#include <cmath>
#include <cstdlib>

namespace peskin {

namespace detail {

inline double mollifier_step(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace detail

/// Smooth cutoff: 1 on |xi| <= 1, 0 on |xi| >= 2, built from exp(-1/x).
inline double lp_cutoff(double xi) {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double up = detail::mollifier_step(2.0 - a);
  const double down = detail::mollifier_step(a - 1.0);
  return up / (up + down);
}

/// Mother annular bump chi(xi) - chi(2 xi), supported in 1/2 <= |xi| <= 2.
inline double lp_mother_bump(double xi) { return lp_cutoff(xi) - lp_cutoff(2.0 * xi); }

/**
 * Littlewood-Paley weight phi_n(k) = phi_0(k / 2^n), supported in
 * 2^{n-1} <= |k| <= 2^{n+1}. The weights telescope, so
 * sum_{n >= 0} phi_n(k) = 1 for every integer k != 0.
 */
inline double lp_weight(int n, double k) { return lp_mother_bump(std::ldexp(k, -n)); }

/// Weight of the residual low block (only k = 0 at integer frequencies).
inline double lp_low_weight(double k) { return lp_cutoff(2.0 * k); }

/// Largest block index with nonzero weight at some |k| <= K.
inline int lp_max_block(int order) {
  // Block n is live for 2^{n-1} < |k|; take the last n with 2^{n-1} < K.
  int n = 0;
  while (std::ldexp(1.0, n) < double(order)) ++n;
  return n;
}

}  // namespace peskin
