#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "peskin/curve.hpp"
#include "peskin/errors.hpp"
#include "peskin/tension.hpp"

namespace peskin {

// Exponential-integrator weights of a complex scalar.

/// e^z - 1 without cancellation for small |z|.
inline Complex expm1(Complex z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// phi1(z) = (e^z - 1) / z
inline Complex phi1(Complex z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return expm1(z) / z;
}

/// phi2(z) = (e^z - 1 - z) / z^2
inline Complex phi2(Complex z) {
  if (std::abs(z) < 0.1) {
    Complex term = 0.5, acc = 0.5;
    for (int j = 1; j <= 9; ++j) {
      term *= z / double(j + 2);
      acc += term;
    }
    return acc;
  }
  return (expm1(z) - z) / (z * z);
}

using Vec2 = std::array<Complex, 2>;

/// 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
  Complex a, b, c, d;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diagonal(Complex x, Complex y) { return {x, 0.0, 0.0, y}; }

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }

  Vec2 operator*(const Vec2& v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
  Mat2 operator*(const Mat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  Mat2 operator*(Complex s) const { return {a * s, b * s, c * s, d * s}; }
  Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
  Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }

  Mat2 inverse() const {
    const Complex dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  double max_abs() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  }
};

/// Singular values (largest first) from |det| and the Frobenius norm.
inline std::array<double, 2> singular_values(const Mat2& m) {
  const double fro2 = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
  const double det = std::abs(m.det());
  const double root = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  const double s1 = std::sqrt(0.5 * (fro2 + root));
  return {s1, s1 > 0.0 ? det / s1 : 0.0};
}

inline double condition_number(const Mat2& m) {
  const auto [s1, s2] = singular_values(m);
  return s2 > 0.0 ? s1 / s2 : std::numeric_limits<double>::infinity();
}

/// M = V diag(values) V^{-1}; columns of V have unit norm.
struct EigenDecomposition {
  Vec2 values;
  Mat2 vectors;
  Mat2 inverse_vectors;
  double condition = 1.0;
};

inline EigenDecomposition eigen_decompose(const Mat2& m) {
  EigenDecomposition e;
  if (m.b == 0.0 && m.c == 0.0) {
    e.values = {m.a, m.d};
    e.vectors = e.inverse_vectors = Mat2::identity();
    return e;
  }
  const Complex half_trace = 0.5 * m.trace();
  const Complex half_gap = 0.5 * (m.a - m.d);
  Complex root = std::sqrt(half_gap * half_gap + m.b * m.c);
  // Larger root first; the other from the determinant to avoid cancellation.
  if (std::real(std::conj(half_trace) * root) < 0.0) root = -root;
  const Complex big = half_trace + root;
  const Complex small = big == 0.0 ? half_trace - root : m.det() / big;
  e.values = {big, small};

  auto column = [&](Complex lambda) {
    // Null vector of (M - lambda): pick the better conditioned of the two rows.
    Vec2 v1{m.b, lambda - m.a}, v2{lambda - m.d, m.c};
    const double n1 = std::hypot(std::abs(v1[0]), std::abs(v1[1]));
    const double n2 = std::hypot(std::abs(v2[0]), std::abs(v2[1]));
    const Vec2& v = n1 >= n2 ? v1 : v2;
    const double n = std::max(n1, n2);
    return Vec2{v[0] / n, v[1] / n};
  };
  const Vec2 v0 = column(e.values[0]), v1 = column(e.values[1]);
  e.vectors = {v0[0], v1[0], v0[1], v1[1]};
  e.condition = condition_number(e.vectors);
  e.inverse_vectors = e.vectors.inverse();
  return e;
}

/**
 * Linear system for the pair (a_m, conj(a_{2-m})), m >= 3:
 *
 *   G = -(1/8) [ (2m-2)A + m B~        -(m-2) B (1+a1)^2/|1+a1| ]
 *              [ -m B (1+conj a1)^2/|1+a1|    (2m-2)A + (m-2) B~ ]
 */
struct ModePairSystem {
  int m = 0;
  Mat2 G;
  EigenDecomposition eigen;
  double spectral_abscissa = 0.0;

  /// Eigenvalues of -8G, larger first.
  std::array<double, 2> scaled_eigenvalues() const {
    double l1 = -8.0 * eigen.values[0].real(), l2 = -8.0 * eigen.values[1].real();
    if (l1 < l2) std::swap(l1, l2);
    return {l1, l2};
  }
};

inline constexpr double max_eigenvector_condition = 1e8;

inline ModePairSystem build_pair_system(int m, const LinearCoefficients& coeffs, Complex a1) {
  const double radius = std::abs(1.0 + a1);
  const Complex rot = (1.0 + a1) * (1.0 + a1) / radius;
  const double diag = (2.0 * m - 2.0) * coeffs.A;
  ModePairSystem sys;
  sys.m = m;
  sys.G = Mat2{diag + m * coeffs.b_tilde, -(m - 2.0) * coeffs.B * rot,
               -double(m) * coeffs.B * std::conj(rot), diag + (m - 2.0) * coeffs.b_tilde} *
          Complex(-1.0 / 8.0);
  sys.eigen = eigen_decompose(sys.G);
  sys.spectral_abscissa = std::max(sys.eigen.values[0].real(), sys.eigen.values[1].real());
  return sys;
}

struct Mode2System {
  double rate = 0.0;  // (A + B~) / 4
};

inline Mode2System build_mode2_system(const LinearCoefficients& coeffs) {
  return {(coeffs.A + coeffs.b_tilde) / 4.0};
}

namespace detail {

template <class F>
Mat2 matrix_function(const ModePairSystem& sys, double dt, F&& f) {
  const auto& e = sys.eigen;
  if (e.condition > max_eigenvector_condition) {
    std::ostringstream msg;
    msg << "mode pair m = " << sys.m << ": eigenvector condition " << e.condition;
    throw IllConditioned(msg.str());
  }
  const Mat2 d = Mat2::diagonal(f(e.values[0] * dt), f(e.values[1] * dt));
  return e.vectors * d * e.inverse_vectors;
}

}  // namespace detail

inline Mat2 exp_pair(const ModePairSystem& sys, double dt) {
  return detail::matrix_function(sys, dt, [](Complex z) { return std::exp(z); });
}

/// (e^{G dt} - I)(G dt)^{-1}
inline Mat2 phi1_pair(const ModePairSystem& sys, double dt) {
  return detail::matrix_function(sys, dt, [](Complex z) { return phi1(z); });
}

inline Mat2 phi2_pair(const ModePairSystem& sys, double dt) {
  return detail::matrix_function(sys, dt, [](Complex z) { return phi2(z); });
}

inline Vec2 propagate_pair(const ModePairSystem& sys, const Vec2& state, double dt) {
  return exp_pair(sys, dt) * state;
}

struct SpectrumRow {
  int m = 0;
  double lambda1 = 0.0;  // larger eigenvalue of -8G
  double lambda2 = 0.0;
  double decay_rate = 0.0;  // min(lambda1, lambda2) / 8
  double condition = 1.0;
};

inline std::vector<SpectrumRow> spectrum_report(const TensionLaw& law, Complex a1, int m_max) {
  if (m_max < 3) throw std::invalid_argument("spectrum_report: m_max must be at least 3");
  const LinearCoefficients coeffs = linear_coefficients(law, a1);
  std::vector<SpectrumRow> rows;
  for (int m = 3; m <= m_max; ++m) {
    const ModePairSystem sys = build_pair_system(m, coeffs, a1);
    const auto [l1, l2] = sys.scaled_eigenvalues();
    rows.push_back({m, l1, l2, -sys.spectral_abscissa, sys.eigen.condition});
  }
  return rows;
}

/// Linear decay rate of a mode k whose pair partner 2 - k lies beyond K.
inline double unpaired_rate(int k, const LinearCoefficients& coeffs) {
  const double ak = std::abs(double(k));
  return ((2.0 * ak + std::abs(k - 1.0) - std::abs(k + 1.0)) * coeffs.A + ak * coeffs.b_tilde) / 8.0;
}

/// Slowest linear decay rate among retained Y modes (mode 2 and all pairs).
inline double slowest_linear_rate(const LinearCoefficients& coeffs, Complex a1, int order) {
  double rate = build_mode2_system(coeffs).rate;
  for (int m = 3; m <= order; ++m) {
    rate = std::min(rate, -build_pair_system(m, coeffs, a1).spectral_abscissa);
  }
  return rate;
}

/// Fastest linear decay rate among retained Y modes, used for the default step.
inline double fastest_linear_rate(const LinearCoefficients& coeffs, Complex a1, int order) {
  double rate = build_mode2_system(coeffs).rate;
  for (int m = 3; m <= order; ++m) {
    const auto& values = build_pair_system(m, coeffs, a1).eigen.values;
    rate = std::max({rate, -values[0].real(), -values[1].real()});
  }
  for (int k = -order; k < 2 - order; ++k) rate = std::max(rate, unpaired_rate(k, coeffs));
  return rate;
}

}  // namespace peskin
