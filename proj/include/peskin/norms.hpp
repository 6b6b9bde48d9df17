#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "peskin/curve.hpp"
#include "peskin/dyadic.hpp"

namespace peskin {

/// Coefficients of P_n f, i.e. phi_n(k) f^(k).
inline ModeArray lp_project(const ModeArray& f, int n) {
  ModeArray out(f.order());
  for (int k = -f.order(); k <= f.order(); ++k) out[k] = lp_weight(n, double(k)) * f[k];
  return out;
}

/// Low part: only the k = 0 coefficient survives at integer frequencies.
inline ModeArray lp_low(const ModeArray& f) {
  ModeArray out(f.order());
  for (int k = -f.order(); k <= f.order(); ++k) out[k] = lp_low_weight(double(k)) * f[k];
  return out;
}

struct DyadicDecomposition {
  ModeArray low;
  std::vector<ModeArray> blocks;  // n = 0 .. lp_max_block(K)

  ModeArray reconstruct() const {
    ModeArray out = low;
    for (const auto& b : blocks) out += b;
    return out;
  }
};

inline DyadicDecomposition decompose(const ModeArray& f) {
  DyadicDecomposition d{lp_low(f), {}};
  const int top = lp_max_block(std::max(f.order(), 1));
  for (int n = 0; n <= top; ++n) d.blocks.push_back(lp_project(f, n));
  return d;
}

/// ||P_n f||_{L^2} by Parseval (unnormalized L^2).
inline double block_l2(const ModeArray& f, int n) { return l2_norm(lp_project(f, n)); }

/// Same quantity by the trapezoidal rule on an M-point grid.
inline double block_l2_quadrature(const ModeArray& f, int n, int n_points) {
  const auto values = modes_to_grid(lp_project(f, n), n_points);
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return std::sqrt(acc * two_pi / double(n_points));
}

/// ||f'||_{L^infinity} sampled with at least eight points per retained mode.
inline double derivative_sup(const ModeArray& f) { return sup_norm(derivative(f), 8); }

/// The two suprema of a norm snapshot, kept apart because trajectory norms
/// take the sup over time of each part separately.
struct NormParts {
  double pointwise = 0.0;
  double blocks = 0.0;

  double total() const { return pointwise + blocks; }
};

inline std::vector<double> block_profile(const ModeArray& f) {
  std::vector<double> out;
  const int top = lp_max_block(std::max(f.order(), 1));
  for (int n = 0; n <= top; ++n) out.push_back(std::pow(2.0, 1.5 * n) * block_l2(f, n));
  return out;
}

/// ||f||_S = ||f'||_inf + sup_n 2^{3n/2} ||P_n f||_2
inline NormParts s_parts(const ModeArray& f) {
  NormParts p{derivative_sup(f), 0.0};
  for (double b : block_profile(f)) p.blocks = std::max(p.blocks, b);
  return p;
}

inline double s_norm(const ModeArray& f) { return s_parts(f).total(); }

/// Z1 integrand at time t: (1+t)^{2/3} ||f'||_inf + sup_n (1 + 2^n t)^{2/3} 2^{3n/2} ||P_n f||_2.
inline NormParts z1_parts(const ModeArray& f, double t) {
  NormParts p{std::pow(1.0 + t, 2.0 / 3.0) * derivative_sup(f), 0.0};
  const auto profile = block_profile(f);
  for (std::size_t n = 0; n < profile.size(); ++n) {
    const double w = std::pow(1.0 + std::ldexp(t, int(n)), 2.0 / 3.0);
    p.blocks = std::max(p.blocks, w * profile[n]);
  }
  return p;
}

inline double z1_weight(const ModeArray& f, double t) { return z1_parts(f, t).total(); }

/**
 * Z2 integrand sup_n (2^n t)^{-1/3} (1 + 2^n t) 2^{3n/2} ||P_n f||_2. At t = 0
 * the weight is singular: blocks that vanish contribute 0, any nonzero block
 * makes the value +infinity.
 */
inline double z2_weight(const ModeArray& f, double t) {
  const auto profile = block_profile(f);
  double out = 0.0;
  for (std::size_t n = 0; n < profile.size(); ++n) {
    if (profile[n] == 0.0) continue;
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    const double x = std::ldexp(t, int(n));
    out = std::max(out, std::pow(x, -1.0 / 3.0) * (1.0 + x) * profile[n]);
  }
  return out;
}

/// Z1-type weight for a derivative-type function g (for example Y1' Y2'):
/// (1+t)^{2/3} ||g||_inf + sup_n (1 + 2^n t)^{2/3} 2^{n/2} ||P_n g||_2.
inline NormParts z1_derivative_parts(const ModeArray& g, double t) {
  NormParts p{std::pow(1.0 + t, 2.0 / 3.0) * sup_norm(g, 8), 0.0};
  const int top = lp_max_block(std::max(g.order(), 1));
  for (int n = 0; n <= top; ++n) {
    const double w = std::pow(1.0 + std::ldexp(t, n), 2.0 / 3.0) * std::pow(2.0, 0.5 * n);
    p.blocks = std::max(p.blocks, w * block_l2(g, n));
  }
  return p;
}

namespace detail {

/// sum |c_k| w(k) + sup_m sum_{|k| in [2^{m-1}, 2^{m+1}]} |c_k| w(k) (1 + |k| t)^{2/3}
inline NormParts shell_norm(const ModeArray& c, double t, bool weight_by_k) {
  auto weight = [&](int k) { return weight_by_k ? std::abs(double(k)) : 1.0; };
  NormParts p;
  for (int k = -c.order(); k <= c.order(); ++k) p.pointwise += std::abs(c[k]) * weight(k);
  for (int m = 0; std::ldexp(1.0, m - 1) <= double(c.order()); ++m) {
    const double lo = std::ldexp(1.0, m - 1), hi = std::ldexp(1.0, m + 1);
    double shell = 0.0;
    for (int k = -c.order(); k <= c.order(); ++k) {
      const double ak = std::abs(double(k));
      if (ak < lo || ak > hi) continue;
      shell += std::abs(c[k]) * weight(k) * std::pow(1.0 + ak * t, 2.0 / 3.0);
    }
    p.blocks = std::max(p.blocks, shell);
  }
  return p;
}

}  // namespace detail

inline NormParts wiener_parts(const ModeArray& f, double t) { return detail::shell_norm(f, t, true); }

/// Time snapshot of the Wiener norm W.
inline double wiener_snapshot(const ModeArray& f, double t) { return wiener_parts(f, t).total(); }

inline NormParts n_parts(const ModeArray& a, double t) { return detail::shell_norm(a, t, false); }

/// A sequence (or function) sampled at increasing times.
struct TimeSeries {
  std::vector<double> times;
  std::vector<ModeArray> values;
};

/// sup_t of each part, summed.
template <class Parts>
double sup_over_time(const TimeSeries& series, Parts&& parts) {
  NormParts sup;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const NormParts p = parts(series.values[i], series.times[i]);
    sup.pointwise = std::max(sup.pointwise, p.pointwise);
    sup.blocks = std::max(sup.blocks, p.blocks);
  }
  return sup.total();
}

inline double n_norm(const TimeSeries& series) { return sup_over_time(series, n_parts); }
inline double w_norm(const TimeSeries& series) { return sup_over_time(series, wiener_parts); }
inline double z1_norm(const TimeSeries& series) { return sup_over_time(series, z1_parts); }

/// C_n = sum_k |A_k| |B_{n-k}|.
inline ModeArray convolve_abs(const ModeArray& a, const ModeArray& b) {
  ModeArray c(a.order() + b.order());
  for (int k = -a.order(); k <= a.order(); ++k) {
    const double ak = std::abs(a[k]);
    if (ak == 0.0) continue;
    for (int j = -b.order(); j <= b.order(); ++j) c[k + j] += ak * std::abs(b[j]);
  }
  return c;
}

/// Pointwise product f g, computed on a grid that resolves it exactly.
inline ModeArray multiply(const ModeArray& f, const ModeArray& g) {
  const int order = f.order() + g.order();
  int n_points = 8;
  while (n_points < 2 * order + 2) n_points *= 2;
  const auto fv = modes_to_grid(f.resized(order), n_points);
  const auto gv = modes_to_grid(g.resized(order), n_points);
  std::vector<Complex> prod(fv.size());
  for (std::size_t j = 0; j < fv.size(); ++j) prod[j] = fv[j] * gv[j];
  return grid_to_modes(prod, order);
}

/// Times 0 and 2^{-j/r} ... covering [2^{-lo}, 2^{hi}] with r points per octave.
inline std::vector<double> time_lattice(int refinement, int lo = 10, int hi = 4) {
  std::vector<double> out{0.0};
  for (int j = -lo * refinement; j <= hi * refinement; ++j) {
    out.push_back(std::exp2(double(j) / double(refinement)));
  }
  return out;
}

struct RatioSuite {
  double constant = 0.0;  // largest ratio over the suite
  double smallest = 0.0;
  std::vector<double> ratios;
};

inline RatioSuite summarize(std::vector<double> ratios) {
  RatioSuite s;
  s.constant = *std::max_element(ratios.begin(), ratios.end());
  s.smallest = *std::min_element(ratios.begin(), ratios.end());
  s.ratios = std::move(ratios);
  return s;
}

/// Sequence family a_k(t) = a_k(0) e^{-|k| t}, sampled on `times`.
inline TimeSeries heat_family(const ModeArray& initial, const std::vector<double>& times) {
  TimeSeries out{times, {}};
  for (double t : times) {
    ModeArray a = initial;
    for (int k = -a.order(); k <= a.order(); ++k) a[k] *= std::exp(-std::abs(double(k)) * t);
    out.values.push_back(std::move(a));
  }
  return out;
}

/**
 * Convolution estimate in the N norm: random sequences A, B normalized to
 * ||A||_N = ||B||_N = 1, C_n(t) = sum_k |A_k(t)| |B_{n-k}(t)|, ratio ||C||_N.
 * Each instance uses |k|^{-p} magnitudes with p drawn in [1.5, 3].
 */
inline RatioSuite convolution_suite(int instances, int order, std::uint64_t seed, int refinement = 1) {
  std::mt19937_64 gen(seed);
  auto unit = [&] { return double(gen() >> 11) * 0x1.0p-53; };
  const auto times = time_lattice(refinement);
  auto draw = [&] {
    const double p = 1.5 + 1.5 * unit();
    ModeArray a(order);
    for (int k = -order; k <= order; ++k) {
      a[k] = unit() * std::pow(1.0 + std::abs(double(k)), -p) * std::polar(1.0, two_pi * unit());
    }
    TimeSeries series = heat_family(a, times);
    const double norm = n_norm(series);
    for (auto& v : series.values) v *= 1.0 / norm;
    return series;
  };
  std::vector<double> ratios;
  for (int i = 0; i < instances; ++i) {
    const TimeSeries a = draw(), b = draw();
    TimeSeries c{times, {}};
    for (std::size_t j = 0; j < times.size(); ++j) c.values.push_back(convolve_abs(a.values[j], b.values[j]));
    ratios.push_back(n_norm(c));
  }
  return summarize(std::move(ratios));
}

/// sup_t z1 of Y1' Y2' over Z1(Y1) Z1(Y2) for two families sampled at common times.
inline double z1_algebra_check(const TimeSeries& y1, const TimeSeries& y2) {
  const double denom = z1_norm(y1) * z1_norm(y2);
  if (denom == 0.0) return 0.0;
  TimeSeries prod{y1.times, {}};
  for (std::size_t i = 0; i < y1.times.size(); ++i) {
    prod.values.push_back(multiply(derivative(y1.values[i]), derivative(y2.values[i])));
  }
  return sup_over_time(prod, z1_derivative_parts) / denom;
}

/**
 * Random two-block families: each Y_i holds one mode in each of two dyadic
 * blocks drawn from 1..max_block, with amplitude 2^{-3n/2}-scaled random
 * size and heat-type decay e^{-|k| t}.
 */
inline RatioSuite z1_algebra_suite(int instances, int max_block, std::uint64_t seed, int refinement = 1) {
  std::mt19937_64 gen(seed);
  auto unit = [&] { return double(gen() >> 11) * 0x1.0p-53; };
  const auto times = time_lattice(refinement);
  const int order = 1 << max_block;
  auto draw = [&] {
    ModeArray a(order);
    for (int b = 0; b < 2; ++b) {
      const int n = 1 + int(gen() % std::uint64_t(max_block));
      const int sign = (gen() & 1) ? 1 : -1;
      const int k = sign * (1 << n);
      a[k] += (0.5 + unit()) * std::pow(2.0, -1.5 * n) * std::polar(1.0, two_pi * unit());
    }
    return heat_family(a, times);
  };
  std::vector<double> ratios;
  for (int i = 0; i < instances; ++i) {
    const TimeSeries y1 = draw(), y2 = draw();
    ratios.push_back(z1_algebra_check(y1, y2));
  }
  return summarize(std::move(ratios));
}

}  // namespace peskin
