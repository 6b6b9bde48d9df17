#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "peskin/curve.hpp"
#include "peskin/errors.hpp"
#include "peskin/norms.hpp"

namespace peskin {

enum class InitKind { single_mode, random_decay, corner, polygonal };

struct TargetNorm {
  std::string name;  // "s" or "w"
  double value = 0.0;
};

struct InitialDataSpec {
  InitKind kind = InitKind::single_mode;
  Complex amplitude = 0.0;

  int mode = 2;                 // single_mode
  bool steady_state = false;    // allow modes 0 and 1 for single_mode

  double exponent = 2.0;        // random_decay
  std::uint64_t seed = 0;

  std::vector<double> positions{0.0};  // corner
  std::vector<double> strengths{1.0};
  double width = std::numbers::pi / 4.0;

  int vertices = 4;             // polygonal

  std::optional<TargetNorm> target;
};

struct GeneratedData {
  FourierCurve curve;
  double s_norm = 0.0;
  double w_norm = 0.0;              // Wiener norm snapshot at t = 0
  double tail_mass = 0.0;           // sum_{|k| > K} |a_k| |k|, or a partial sum if divergent
  bool tail_divergent = false;
  bool tail_warning = false;        // tail above 1e-6 of the W norm
};

/// min over grid pairs of |X(s_i) - X(s_j)| / |2 sin((s_i - s_j)/2)| for the full curve.
inline double chord_arc_ratio(const FourierCurve& curve, int n_points) {
  const auto grid = synthesize(curve, n_points);
  double out = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_points; ++i) {
    for (int j = i + 1; j < n_points; ++j) {
      const double chord = std::abs(grid.samples[std::size_t(i)] - grid.samples[std::size_t(j)]);
      const double arc = std::abs(2.0 * std::sin(0.5 * (grid.node(i) - grid.node(j))));
      out = std::min(out, chord / arc);
    }
  }
  return out;
}

inline FourierCurve make_single_mode(int order, int k, Complex amp, bool steady_state = false) {
  if (!steady_state && (k == 0 || k == 1)) {
    throw ConfigError("single mode: k = " + std::to_string(k) +
                      " is a steady-state mode; set steady_state to allow it");
  }
  if (std::abs(k) > order) {
    throw ConfigError("single mode: |k| = " + std::to_string(std::abs(k)) + " exceeds K");
  }
  ModeArray m(order);
  m[k] = amp;
  return FourierCurve(std::move(m));
}

/// Fourier coefficient of the 2 pi-periodic tent max(0, 1 - |s|/w), w <= pi.
inline double tent_coefficient(int k, double width) {
  if (k == 0) return width / two_pi;
  const double s = std::sin(0.5 * double(k) * width);
  return 2.0 * s * s / (std::numbers::pi * width * double(k) * double(k));
}

/// X^_k = amp sum_j strength_j h^_{k-1} e^{-i(k-1) p_j}, i.e. e^{is} amp h(s).
inline Complex corner_coefficient(int k, const std::vector<double>& positions,
                                  const std::vector<double>& strengths, double width, double amp) {
  Complex acc{};
  for (std::size_t j = 0; j < positions.size(); ++j) {
    acc += strengths[j] * std::polar(1.0, -double(k - 1) * positions[j]);
  }
  return amp * tent_coefficient(k - 1, width) * acc;
}

inline void check_corner_args(const std::vector<double>& positions,
                              const std::vector<double>& strengths, double width) {
  if (positions.empty() || positions.size() != strengths.size()) {
    throw ConfigError("corner: positions and strengths must be non-empty and of equal length");
  }
  if (!(width > 0.0 && width <= std::numbers::pi)) {
    throw ConfigError("corner: tent width must lie in (0, pi]");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const double d = std::remainder(positions[i] - positions[j], two_pi);
      if (std::abs(d) < 1e-12) throw ConfigError("corner: positions must be distinct");
    }
  }
}

/// Radial tent perturbation e^{is} amp h(s) with modes 0 and 1 removed, truncated at K.
inline FourierCurve make_corner(int order, const std::vector<double>& positions,
                                const std::vector<double>& strengths, double amp,
                                double width = std::numbers::pi / 4.0) {
  check_corner_args(positions, strengths, width);
  ModeArray m(order);
  for (int k = -order; k <= order; ++k) {
    if (k == 0 || k == 1) continue;
    m[k] = corner_coefficient(k, positions, strengths, width, amp);
  }
  return FourierCurve(std::move(m));
}

/// n equal corners at 2 pi j / n with tents of half-width pi / n, a polygon-like zigzag.
inline FourierCurve make_polygonal(int order, int vertices, double amp) {
  if (vertices < 2) throw ConfigError("polygonal: need at least two vertices");
  std::vector<double> positions, strengths;
  for (int j = 0; j < vertices; ++j) {
    positions.push_back(two_pi * double(j) / double(vertices));
    strengths.push_back(1.0);
  }
  return make_corner(order, positions, strengths, amp, std::numbers::pi / double(vertices));
}

/**
 * a_k = amp zeta_k |k|^{-p} for k not in {0, 1}. Phases come from a seeded
 * mt19937_64 drawn in the order k = 2, -1, 3, -2, ..., so raising K appends
 * modes without changing the existing ones.
 */
inline FourierCurve make_random_decay(int order, double exponent, std::uint64_t seed, Complex amp) {
  if (!(exponent > 1.0)) throw ConfigError("random_decay: exponent must exceed 1");
  std::mt19937_64 gen(seed);
  auto phase = [&] { return std::polar(1.0, two_pi * double(gen() >> 11) * 0x1.0p-53); };
  ModeArray m(order);
  for (int j = 2; j <= order + 1; ++j) {
    const Complex up = phase(), down = phase();
    if (j <= order) m[j] = amp * up * std::pow(double(j), -exponent);
    m[1 - j] = amp * down * std::pow(double(j - 1), -exponent);
  }
  return FourierCurve(std::move(m));
}

namespace detail {

/// sum_{K < |k| <= cutoff} |a_k| |k| for a closed-form coefficient law.
template <class F>
double tail_partial_sum(int order, int cutoff, F&& coeff) {
  double acc = 0.0;
  for (int k = order + 1; k <= cutoff; ++k) {
    acc += (std::abs(coeff(k)) + std::abs(coeff(-k))) * double(k);
  }
  return acc;
}

}  // namespace detail

inline double initial_norm(const ModeArray& y, const std::string& name) {
  if (name == "s") return s_norm(y);
  if (name == "w") return wiener_snapshot(y, 0.0);
  throw ConfigError("unknown target norm '" + name + "' (expected \"s\" or \"w\")");
}

/// Builds the data, rescales to the target norm if requested, and reports norms and tail mass.
inline GeneratedData generate(const InitialDataSpec& spec, int order) {
  GeneratedData out;
  std::function<Complex(int)> tail_coeff;
  double amp_scale = 1.0;
  switch (spec.kind) {
    case InitKind::single_mode:
      out.curve = make_single_mode(order, spec.mode, spec.amplitude, spec.steady_state);
      break;
    case InitKind::random_decay: {
      out.curve = make_random_decay(order, spec.exponent, spec.seed, spec.amplitude);
      const double p = spec.exponent;
      const double a = std::abs(spec.amplitude);
      tail_coeff = [a, p](int k) { return Complex(a * std::pow(std::abs(double(k)), -p)); };
      out.tail_divergent = p <= 2.0;
      break;
    }
    case InitKind::corner:
    case InitKind::polygonal: {
      std::vector<double> positions = spec.positions, strengths = spec.strengths;
      double width = spec.width;
      if (spec.kind == InitKind::polygonal) {
        out.curve = make_polygonal(order, spec.vertices, spec.amplitude.real());
        positions.clear();
        strengths.clear();
        for (int j = 0; j < spec.vertices; ++j) {
          positions.push_back(two_pi * double(j) / double(spec.vertices));
          strengths.push_back(1.0);
        }
        width = std::numbers::pi / double(spec.vertices);
      } else {
        out.curve = make_corner(order, positions, strengths, spec.amplitude.real(), width);
      }
      const double amp = spec.amplitude.real();
      tail_coeff = [positions, strengths, width, amp](int k) {
        return corner_coefficient(k, positions, strengths, width, amp);
      };
      // |k| |a_k| ~ 1/|k|: a corner is not in the Wiener algebra.
      out.tail_divergent = true;
      break;
    }
  }

  const ModeArray y = split(out.curve).y;
  if (spec.target) {
    const double current = initial_norm(y, spec.target->name);
    if (current == 0.0) throw ConfigError("target norm requested for zero data");
    amp_scale = spec.target->value / current;
    out.curve.modes *= amp_scale;
  }
  const ModeArray scaled_y = split(out.curve).y;
  out.s_norm = s_norm(scaled_y);
  out.w_norm = wiener_snapshot(scaled_y, 0.0);
  if (tail_coeff) {
    out.tail_mass = amp_scale * detail::tail_partial_sum(order, 64 * order, tail_coeff);
    if (!out.tail_divergent && spec.kind == InitKind::random_decay) {
      // Integral remainder beyond the partial sum.
      const double p = spec.exponent, n = 64.0 * order;
      out.tail_mass += amp_scale * 2.0 * std::abs(spec.amplitude) * std::pow(n, 2.0 - p) / (p - 2.0);
    }
  }
  out.tail_warning = out.tail_divergent || out.tail_mass > 1e-6 * out.w_norm;

  if (spec.kind == InitKind::corner || spec.kind == InitKind::polygonal) {
    const double ratio = chord_arc_ratio(out.curve, std::max(16, 4 * order));
    if (!(ratio > 0.1)) {
      std::ostringstream msg;
      msg << "corner data: chord-arc ratio " << ratio << " at the working resolution";
      throw GeometryError(msg.str());
    }
  }
  return out;
}

}  // namespace peskin
