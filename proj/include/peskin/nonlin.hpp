#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "peskin/curve.hpp"
#include "peskin/errors.hpp"
#include "peskin/tension.hpp"

namespace peskin {

struct EvalOptions {
  int threads = 1;
  /// Minimum of |X(r) - X(s)| / |2 sin((s - r)/2)| over sampled pairs.
  double chord_arc_threshold = 0.1;
};

/// The right-hand side N of the evolution equation on the grid and in modes.
struct NonlinearityEvaluation {
  ModeArray modes;                   // N^_k, |k| <= K
  std::vector<Complex> grid_values;  // N(s_j), s_j = 2 pi j / M
  int quadrature_M = 0;
  double chord_arc_min = 0.0;
};

namespace detail {

/// Per-offset tables for r = s_j + (2l + 1) pi / M, independent of j.
struct OffsetTables {
  std::vector<double> rot_re, rot_im;    // e^{-i(s - r)}
  std::vector<double> hs_re, hs_im;      // e^{-i(r - s)/2} / (2 sin((s - r)/2))
  std::vector<double> ch_re, ch_im;      // e^{+i(r - s)/2} / (2 sin((s - r)/2))

  explicit OffsetTables(int m) {
    rot_re.resize(m); rot_im.resize(m);
    hs_re.resize(m); hs_im.resize(m);
    ch_re.resize(m); ch_im.resize(m);
    for (int l = 0; l < m; ++l) {
      const double delta = (2.0 * l + 1.0) * std::numbers::pi / double(m);  // r - s
      const double sn = 2.0 * std::sin(-delta / 2.0);
      rot_re[l] = std::cos(delta);
      rot_im[l] = std::sin(delta);
      hs_re[l] = std::cos(-delta / 2.0) / sn;
      hs_im[l] = std::sin(-delta / 2.0) / sn;
      ch_re[l] = std::cos(delta / 2.0) / sn;
      ch_im[l] = std::sin(delta / 2.0) / sn;
    }
  }
};

}  // namespace detail

/**
 * Evaluates
 *
 *   N(s) = -i/(4 pi) p.v. int Re[ e^{-i(s-r)} (1 - i e^{-ir} X'(r))^2 / (1 + i X~(s,r))^2 ]
 *            * e^{i(s+r)/2} (1 + i X~(s,r)) / (2 sin((s-r)/2)) * T(|1 - i e^{-ir} X'(r)|) dr
 *
 * with X~(s,r) = e^{-i(s+r)/2} (X(r) - X(s)) / (2 sin((s-r)/2)). Outer points
 * are s_j = 2 pi j / M; the inner rule samples the half-step offset grid so
 * r = s is never hit. Each outer point is summed in a fixed order, so the
 * result does not depend on the thread count.
 */
inline NonlinearityEvaluation eval_nonlinearity(const FourierCurve& curve, const TensionLaw& law,
                                                int quadrature_M, const EvalOptions& options = {}) {
  const int m = quadrature_M;
  check_grid(curve.order(), m);
  const double half_step = std::numbers::pi / double(m);

  const std::vector<Complex> x_out = modes_to_grid(curve.modes, m);
  const std::vector<Complex> x_in = modes_to_grid(curve.modes, m, half_step);
  const std::vector<Complex> xp_in = modes_to_grid(derivative(curve.modes), m, half_step);

  // Inner-node quantities: q = 1 - i e^{-ir} X'(r) (so X_full' = i e^{ir} q), q^2 and T(|q|).
  std::vector<double> xin_re(m), xin_im(m), qq_re(m), qq_im(m), tq(m);
  for (int i = 0; i < m; ++i) {
    const double r = (2.0 * i + 1.0) * half_step;
    const Complex q = 1.0 - imag_unit * std::polar(1.0, -r) * xp_in[std::size_t(i)];
    const double stretch = std::abs(q);
    if (!law.admits(stretch)) {
      std::ostringstream msg;
      msg << "stretch |X'| = " << stretch << " at r = " << r << " outside ["
          << law.validity().r_min << ", " << law.validity().r_max << "]";
      throw TensionDomainError(msg.str());
    }
    const Complex qq = q * q;
    xin_re[i] = x_in[std::size_t(i)].real();
    xin_im[i] = x_in[std::size_t(i)].imag();
    qq_re[i] = qq.real();
    qq_im[i] = qq.imag();
    tq[i] = small_t(law, stretch);
  }

  const detail::OffsetTables tables(m);
  std::vector<Complex> values(static_cast<std::size_t>(m));
  const int n_threads = std::clamp(options.threads, 1, m);
  std::vector<double> chord_min(std::size_t(n_threads), std::numeric_limits<double>::infinity());

  auto work = [&](int worker) {
    double local_min = std::numeric_limits<double>::infinity();
    for (int j = worker; j < m; j += n_threads) {
      const double sj = two_pi * double(j) / double(m);
      const double es_re = std::cos(sj), es_im = -std::sin(sj);  // e^{-is}
      const double xs_re = x_out[std::size_t(j)].real(), xs_im = x_out[std::size_t(j)].imag();
      double acc_re = 0.0, acc_im = 0.0, min_w2 = std::numeric_limits<double>::infinity();
      for (int l = 0; l < m; ++l) {
        int i = j + l;
        if (i >= m) i -= m;
        // u = e^{-is} (X(r) - X(s)); X~ = u * hs
        const double d_re = xin_re[i] - xs_re, d_im = xin_im[i] - xs_im;
        const double u_re = es_re * d_re - es_im * d_im, u_im = es_re * d_im + es_im * d_re;
        const double xt_re = u_re * tables.hs_re[l] - u_im * tables.hs_im[l];
        const double xt_im = u_re * tables.hs_im[l] + u_im * tables.hs_re[l];
        // w = 1 + i X~
        const double w_re = 1.0 - xt_im, w_im = xt_re;
        const double w2_re = w_re * w_re - w_im * w_im, w2_im = 2.0 * w_re * w_im;
        const double w2_abs2 = w2_re * w2_re + w2_im * w2_im;
        min_w2 = std::min(min_w2, w_re * w_re + w_im * w_im);
        // num = e^{-i(s-r)} q^2; Re(num / w^2) = Re(num conj(w^2)) / |w^2|^2
        const double n_re = tables.rot_re[l] * qq_re[i] - tables.rot_im[l] * qq_im[i];
        const double n_im = tables.rot_re[l] * qq_im[i] + tables.rot_im[l] * qq_re[i];
        const double weight = (n_re * w2_re + n_im * w2_im) / w2_abs2 * tq[i];
        // accumulate weight * ch * w; the common e^{is} factor is applied after the sum
        const double f_re = tables.ch_re[l] * w_re - tables.ch_im[l] * w_im;
        const double f_im = tables.ch_re[l] * w_im + tables.ch_im[l] * w_re;
        acc_re += weight * f_re;
        acc_im += weight * f_im;
      }
      // N = -i/(4 pi) * (2 pi / M) * e^{is} * acc
      const Complex sum = Complex(es_re, -es_im) * Complex(acc_re, acc_im);
      values[std::size_t(j)] = -imag_unit * sum / (2.0 * double(m));
      local_min = std::min(local_min, std::sqrt(min_w2));
    }
    chord_min[std::size_t(worker)] = local_min;
  };

  if (n_threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(std::size_t(n_threads));
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(work, w);
  }

  NonlinearityEvaluation out;
  out.chord_arc_min = *std::min_element(chord_min.begin(), chord_min.end());
  if (!(out.chord_arc_min > options.chord_arc_threshold)) {
    std::ostringstream msg;
    msg << "chord-arc ratio " << out.chord_arc_min << " below " << options.chord_arc_threshold
        << " (curve near self-intersection)";
    throw GeometryError(msg.str());
  }
  out.modes = grid_to_modes(values, curve.order());
  out.grid_values = std::move(values);
  out.quadrature_M = m;
  return out;
}

/**
 * Linear part c_k of N about the circle a0 + (1 + a1) e^{is}, applied to the
 * Y modes (slots 0 and 1 of `y` are ignored):
 *
 *   c_k = -(A/8) a_k (2|k| + |k-1| - |k+1|) - (B|1+a1|/8) a_k (|k| - d1(k))
 *         + (B|1+a1|/8) (1+a1)^2/|1+a1|^2 conj(a_{2-k}) (|2-k| - d1(2-k) - 2 d2(2-k)).
 *
 * d1, d2 are Kronecker deltas at 1 and 2. The coupling partner a_{2-k} is
 * read as zero when it lies outside the truncation.
 */
inline ModeArray linear_part(const ModeArray& y, const LinearCoefficients& coeffs, Complex a1) {
  const int order = y.order();
  const double radius = std::abs(1.0 + a1);
  const Complex unit = (1.0 + a1) * (1.0 + a1) / (radius * radius);
  auto delta = [](int k, int at) { return k == at ? 1.0 : 0.0; };
  auto ymode = [&](int k) { return (k == 0 || k == 1) ? Complex{} : y.at(k); };

  ModeArray out(order);
  for (int k = -order; k <= order; ++k) {
    const double ak_abs = std::abs(double(k));
    const Complex ak = ymode(k);
    const int j = 2 - k;
    const Complex aj = ymode(j);
    const double diag_a = 2.0 * ak_abs + std::abs(double(k - 1)) - std::abs(double(k + 1));
    const double diag_b = ak_abs - delta(k, 1);
    const double couple = std::abs(double(j)) - delta(j, 1) - 2.0 * delta(j, 2);
    out[k] = -(coeffs.A / 8.0) * ak * diag_a - (coeffs.b_tilde / 8.0) * ak * diag_b +
             (coeffs.b_tilde / 8.0) * unit * std::conj(aj) * couple;
  }
  return out;
}

inline ModeArray eval_linear_part(const CurveSplit& parts, const TensionLaw& law) {
  return linear_part(parts.y, linear_coefficients(law, parts.a1), parts.a1);
}

/// L_k = N^_k - c_k, the part of N beyond the linearization.
inline ModeArray eval_residual(const FourierCurve& curve, const TensionLaw& law, int quadrature_M,
                               const EvalOptions& options = {}) {
  ModeArray n_modes = eval_nonlinearity(curve, law, quadrature_M, options).modes;
  n_modes -= eval_linear_part(split(curve), law);
  return n_modes;
}

}  // namespace peskin
