#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "peskin/curve.hpp"
#include "peskin/dyadic.hpp"

namespace peskin::kernels {

// ---------------------------------------------------------------------------
// Principal-value identities on the torus.

/// I_k = (1/2pi) p.v. int e^{-i a/2} e^{-ika} / (2 sin(a/2)) da = -(i/2) sgn(k), sgn(0) = +1.
inline Complex ik_exact(int k) { return {0.0, k >= 0 ? -0.5 : 0.5}; }

/// J_k = (1/2pi) p.v. int (e^{-ika} - 1) / (4 sin^2(a/2)) da = -|k|/2.
inline double jk_exact(int k) { return -0.5 * std::abs(double(k)); }

namespace detail {

/// (i k)^order
inline Complex ik_power(int k, int order) {
  Complex out{1.0, 0.0};
  for (int i = 0; i < order; ++i) out *= imag_unit * double(k);
  return out;
}

/// 1 - e^{-ix} without cancellation for small x.
inline Complex one_minus_expi(double x) {
  const double h = std::sin(x / 2.0);
  return {2.0 * h * h, std::sin(x)};
}

inline void check_pv_grid(int k, int n_points) {
  if (n_points <= 0 || n_points % 2 != 0) {
    throw std::invalid_argument("p.v. quadrature needs an even number of nodes");
  }
  if (n_points < 8 * std::abs(k) + 8) {
    throw std::invalid_argument("p.v. quadrature: M must be at least 8|k| + 8");
  }
}

/// Midpoint rule on a_j = (2j+1) pi / M. The nodes come in pairs +-a (mod 2 pi)
/// and never touch a = 0; summing each pair first makes odd singular parts
/// cancel exactly in floating point.
template <class Integrand>
Complex midpoint_pv(int n_points, Integrand&& f) {
  Complex acc{};
  for (int j = n_points / 2 - 1; j >= 0; --j) {
    const double a = (2.0 * j + 1.0) * std::numbers::pi / double(n_points);
    acc += f(a) + f(-a);
  }
  return acc / double(n_points);  // (1/2pi) * (2pi/M)
}

}  // namespace detail

inline Complex pv_quadrature_ik(int k, int n_points) {
  detail::check_pv_grid(k, n_points);
  return detail::midpoint_pv(n_points, [k](double a) {
    return std::polar(1.0, -a / 2.0 - double(k) * a) / (2.0 * std::sin(a / 2.0));
  });
}

inline Complex pv_quadrature_jk(int k, int n_points) {
  detail::check_pv_grid(k, n_points);
  return detail::midpoint_pv(n_points, [k](double a) {
    const double s = std::sin(a / 2.0);
    return -detail::one_minus_expi(double(k) * a) / (4.0 * s * s);
  });
}

// ---------------------------------------------------------------------------
// Dyadic kernels psi_n, L_n and the corrected L~_n.

/// Frequencies carried by psi_n: the support of phi_{n+2}, excluding k = 1.
inline int psi_band(int n) { return 1 << (n + 3); }

/// Fourier coefficients of psi_n (order 2^{n+3}); psi^_n(k) = phi_{n+2}(k), k != 1.
inline ModeArray psi_modes(int n) {
  if (n < 0) throw std::invalid_argument("psi_n: block index must be >= 0");
  ModeArray c(psi_band(n));
  for (int k = -c.order(); k <= c.order(); ++k) {
    if (k != 1) c[k] = lp_weight(n + 2, double(k));
  }
  return c;
}

/// psi_n evaluated pointwise by its finite Fourier sum, with derivatives.
class PsiKernel {
 public:
  explicit PsiKernel(int n) : n_(n), modes_(psi_modes(n)) {}

  int block() const { return n_; }
  const ModeArray& modes() const { return modes_; }

  Complex operator()(double s) const { return derivative(s, 0); }

  Complex derivative(double s, int order) const {
    Complex acc{};
    for (int k = -modes_.order(); k <= modes_.order(); ++k) {
      if (modes_[k] == 0.0) continue;
      acc += modes_[k] * detail::ik_power(k, order) * std::polar(1.0, double(k) * s);
    }
    return acc;
  }

 private:
  int n_;
  ModeArray modes_;
};

inline Complex psi_n(int n, double s) { return PsiKernel(n)(s); }

namespace detail {

inline constexpr double small_alpha = 1e-8;

/// e^{-i a/2} / (2 sin(a/2))
inline Complex hilbert_factor(double alpha) {
  return std::polar(1.0, -alpha / 2.0) / (2.0 * std::sin(alpha / 2.0));
}

/// sin(x) - x, series for small |x|.
inline double sin_minus_x(double x) {
  if (std::abs(x) > 1e-2) return std::sin(x) - x;
  const double x2 = x * x;
  return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
}

}  // namespace detail

/// L_n(s, alpha) from the defining sum over k not in {0, 1}.
inline Complex l_kernel_sum(int n, double s, double alpha) {
  const ModeArray c = psi_modes(n);
  Complex acc{};
  for (int k = -c.order(); k <= c.order(); ++k) {
    if (k == 0 || k == 1 || c[k] == 0.0) continue;
    const double x = alpha * double(k);
    const Complex quotient = std::abs(alpha) < detail::small_alpha
                                 ? Complex(0.0, double(k))
                                 : detail::hilbert_factor(alpha) * detail::one_minus_expi(x);
    acc += c[k] * quotient * std::polar(1.0, double(k) * s);
  }
  return acc;
}

/// L_n(s, alpha) = e^{-i alpha/2} (psi_n(s) - psi_n(s - alpha)) / (2 sin(alpha/2)).
inline Complex l_kernel(int n, double s, double alpha) {
  const PsiKernel psi(n);
  if (std::abs(alpha) < detail::small_alpha) return psi.derivative(s, 1);
  return detail::hilbert_factor(alpha) * (psi(s) - psi(s - alpha));
}

/**
 * How the correction weight min{1, 2^n alpha} 2^{-n} treats negative alpha.
 *
 * signed_literal: min{1, 2^n alpha} as written (no clamp below).
 * absolute:       min{1, 2^n |alpha|}.
 * odd:            sgn(alpha) min{1, 2^n |alpha|}; reduces to alpha psi_n'(s)
 *                 for 2^n |alpha| <= 1 on both sides.
 * All three agree for alpha > 0.
 */
enum class CorrectionForm { signed_literal, absolute, odd };

inline double correction_weight(int n, double alpha, CorrectionForm form) {
  const double scale = std::ldexp(1.0, n);
  switch (form) {
    case CorrectionForm::signed_literal:
      return std::min(1.0, scale * alpha) / scale;
    case CorrectionForm::absolute:
      return std::min(1.0, scale * std::abs(alpha)) / scale;
    case CorrectionForm::odd:
      return std::copysign(std::min(1.0, scale * std::abs(alpha)), alpha) / scale;
  }
  return 0.0;
}

/// L~_n = L_n - e^{-i alpha/2} / (2 sin(alpha/2)) * w(alpha) * psi_n'(s).
inline Complex l_tilde_kernel(int n, double s, double alpha,
                              CorrectionForm form = CorrectionForm::signed_literal) {
  if (std::abs(alpha) < detail::small_alpha) {
    // psi'(s) (1 - w/alpha) -> 0 when w = alpha near zero.
    if (form == CorrectionForm::absolute && alpha < 0.0) return 2.0 * PsiKernel(n).derivative(s, 1);
    return 0.0;
  }
  const PsiKernel psi(n);
  const double w = correction_weight(n, alpha, form);
  return detail::hilbert_factor(alpha) * (psi(s) - psi(s - alpha) - w * psi.derivative(s, 1));
}

// ---------------------------------------------------------------------------
// Grid evaluation for L1 norms over s.

/// Fourier coefficients of L_n(., alpha).
inline ModeArray l_kernel_modes(int n, double alpha) {
  ModeArray c = psi_modes(n);
  c[0] = 0.0;
  for (int k = -c.order(); k <= c.order(); ++k) {
    if (c[k] == 0.0) continue;
    const Complex quotient = std::abs(alpha) < detail::small_alpha
                                 ? Complex(0.0, double(k))
                                 : detail::hilbert_factor(alpha) * detail::one_minus_expi(alpha * k);
    c[k] *= quotient;
  }
  return c;
}

/// Fourier coefficients of L~_n(., alpha).
inline ModeArray l_tilde_modes(int n, double alpha,
                               CorrectionForm form = CorrectionForm::signed_literal) {
  ModeArray c = psi_modes(n);
  const double w = correction_weight(n, alpha, form);
  const Complex factor = detail::hilbert_factor(alpha);
  for (int k = -c.order(); k <= c.order(); ++k) {
    if (c[k] == 0.0) continue;
    const double x = alpha * double(k);
    // (1 - e^{-ix}) - i k w, with the i(sin x - x) part formed directly when w = alpha.
    Complex bracket;
    if (w == alpha) {
      const double h = std::sin(x / 2.0);
      bracket = {2.0 * h * h, detail::sin_minus_x(x)};
    } else {
      bracket = detail::one_minus_expi(x) - imag_unit * double(k) * w;
    }
    c[k] *= factor * bracket;
  }
  return c;
}

/// Integral over the torus of |f| by the trapezoid rule on `n_points` nodes.
inline double l1_norm(const ModeArray& c, int n_points) {
  double acc = 0.0;
  for (const auto& v : modes_to_grid(c, n_points)) acc += std::abs(v);
  return acc * two_pi / double(n_points);
}

inline double psi_l1_norm(int n, int derivative_order, int n_points) {
  ModeArray c = psi_modes(n);
  for (int k = -c.order(); k <= c.order(); ++k) c[k] *= detail::ik_power(k, derivative_order);
  return l1_norm(c, n_points);
}

inline double l_kernel_l1(int n, double alpha, int n_points) {
  return l1_norm(l_kernel_modes(n, alpha), n_points);
}

inline double l_tilde_l1(int n, double alpha, int n_points,
                         CorrectionForm form = CorrectionForm::signed_literal) {
  return l1_norm(l_tilde_modes(n, alpha, form), n_points);
}

/// Integral of |d/dalpha L~_n(., alpha)| via a central difference in alpha.
inline double l_tilde_dalpha_l1(int n, double alpha, int n_points,
                                CorrectionForm form = CorrectionForm::signed_literal) {
  const double h = 1e-5 * std::abs(alpha);
  ModeArray d = l_tilde_modes(n, alpha + h, form);
  d -= l_tilde_modes(n, alpha - h, form);
  d *= Complex(1.0 / (2.0 * h));
  return l1_norm(d, n_points);
}

// ---------------------------------------------------------------------------
// Fitted bound constants.

/// Sample lattice for kernel bound fits: alpha_j = pi 2^{-j / refinement},
/// j = 0 .. refinement * depth, and s-grids with `s_oversample * refinement`
/// nodes per retained frequency.
struct BoundLattice {
  int max_block = 6;
  int depth_below_block = 8;  // alpha reaches 2^{-n-depth}
  int refinement = 1;         // 2 doubles both the alpha and s lattices
  int s_oversample = 4;

  int s_points(int n) const { return 2 * psi_band(n) * s_oversample * refinement; }

  std::vector<double> alphas(int n) const {
    std::vector<double> out;
    const int steps = refinement * (n + depth_below_block);
    for (int j = 0; j <= steps; ++j) {
      out.push_back(std::numbers::pi * std::exp2(-double(j) / double(refinement)));
    }
    return out;
  }
};

/// Largest ratio of a measured quantity to its model bound over a lattice,
/// with the per-block maxima kept for growth diagnostics.
struct BoundFit {
  std::string name;
  double constant = 0.0;
  std::vector<double> per_block;
};

inline BoundFit fit_psi_bound(const BoundLattice& lattice, int derivative_order) {
  BoundFit fit{"psi_d" + std::to_string(derivative_order), 0.0, {}};
  for (int n = 0; n <= lattice.max_block; ++n) {
    const double ratio = psi_l1_norm(n, derivative_order, lattice.s_points(n)) /
                         std::ldexp(1.0, derivative_order * n);
    fit.per_block.push_back(ratio);
    fit.constant = std::max(fit.constant, ratio);
  }
  return fit;
}

/// Generic (n, alpha) lattice fit. `filter` selects admissible (n, alpha).
inline BoundFit fit_kernel_bound(
    const std::string& name, const BoundLattice& lattice,
    const std::function<double(int, double, int)>& measure,
    const std::function<double(int, double)>& bound,
    const std::function<bool(int, double)>& filter = [](int, double) { return true; }) {
  BoundFit fit{name, 0.0, {}};
  for (int n = 0; n <= lattice.max_block; ++n) {
    double block_max = 0.0;
    for (double alpha : lattice.alphas(n)) {
      if (!filter(n, alpha)) continue;
      block_max = std::max(block_max, measure(n, alpha, lattice.s_points(n)) / bound(n, alpha));
    }
    fit.per_block.push_back(block_max);
    fit.constant = std::max(fit.constant, block_max);
  }
  return fit;
}

/// int |L_n| <~ min{2^n, |alpha|^{-1}}
inline BoundFit fit_l_bound(const BoundLattice& lattice) {
  return fit_kernel_bound(
      "L", lattice, [](int n, double a, int m) { return l_kernel_l1(n, a, m); },
      [](int n, double a) { return std::min(std::ldexp(1.0, n), 1.0 / std::abs(a)); });
}

/// int |L~_n| <~ min{2^{2n} |alpha|, |alpha|^{-1}}
inline BoundFit fit_l_tilde_bound(const BoundLattice& lattice,
                                  CorrectionForm form = CorrectionForm::signed_literal) {
  return fit_kernel_bound(
      "L_tilde", lattice, [form](int n, double a, int m) { return l_tilde_l1(n, a, m, form); },
      [](int n, double a) {
        return std::min(std::ldexp(1.0, 2 * n) * std::abs(a), 1.0 / std::abs(a));
      });
}

/// int |L~_n| <~ 2^{2n} |alpha| restricted to 2^n |alpha| <= 1/4.
inline BoundFit fit_l_tilde_small_alpha(const BoundLattice& lattice,
                                        CorrectionForm form = CorrectionForm::signed_literal) {
  return fit_kernel_bound(
      "L_tilde_small_alpha", lattice,
      [form](int n, double a, int m) { return l_tilde_l1(n, a, m, form); },
      [](int n, double a) { return std::ldexp(1.0, 2 * n) * std::abs(a); },
      [](int n, double a) { return std::ldexp(1.0, n) * std::abs(a) <= 0.25; });
}

/// int |d/dalpha L~_n| <~ min{2^{2n}, alpha^{-2}}
inline BoundFit fit_l_tilde_dalpha_bound(const BoundLattice& lattice,
                                         CorrectionForm form = CorrectionForm::signed_literal) {
  return fit_kernel_bound(
      "dL_tilde", lattice,
      [form](int n, double a, int m) { return l_tilde_dalpha_l1(n, a, m, form); },
      [](int n, double a) { return std::min(std::ldexp(1.0, 2 * n), 1.0 / (a * a)); });
}

}  // namespace peskin::kernels
