#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peskin/fft.hpp"

namespace peskin {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr Complex imag_unit{0.0, 1.0};

/// Fourier coefficients c_k for |k| <= K. Indices outside the range read as zero.
class ModeArray {
 public:
  ModeArray() = default;

  explicit ModeArray(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("ModeArray: negative truncation order");
    coeffs_.assign(std::size_t(2 * order + 1), Complex{});
  }

  int order() const { return order_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex& operator[](int k) { return coeffs_[std::size_t(k + order_)]; }
  const Complex& operator[](int k) const { return coeffs_[std::size_t(k + order_)]; }

  Complex at(int k) const { return std::abs(k) <= order_ ? (*this)[k] : Complex{}; }

  std::span<Complex> values() { return coeffs_; }
  std::span<const Complex> values() const { return coeffs_; }

  /// Same coefficients at a different truncation (zero-padded or cut).
  ModeArray resized(int order) const {
    ModeArray out(order);
    const int common = std::min(order, order_);
    for (int k = -common; k <= common; ++k) out[k] = (*this)[k];
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  ModeArray& operator+=(const ModeArray& other) {
    check_same(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
  }
  ModeArray& operator-=(const ModeArray& other) {
    check_same(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
  }
  ModeArray& operator*=(Complex factor) {
    for (auto& c : coeffs_) c *= factor;
    return *this;
  }

  friend ModeArray operator+(ModeArray a, const ModeArray& b) { return a += b; }
  friend ModeArray operator-(ModeArray a, const ModeArray& b) { return a -= b; }
  friend ModeArray operator*(Complex f, ModeArray a) { return a *= f; }

  bool operator==(const ModeArray&) const = default;

 private:
  void check_same(const ModeArray& other) const {
    if (other.order_ != order_) throw std::invalid_argument("ModeArray: order mismatch");
  }

  int order_ = 0;
  std::vector<Complex> coeffs_{Complex{}};
};

/**
 * Interface state: the curve is e^{is} + X(s) with X = sum_k a_k e^{iks}.
 *
 * The base circle e^{is} is implicit; `modes` holds the perturbation X only,
 * so the translation of the curve lives in a_0 and the radius/rotation change
 * in a_1.
 */
struct FourierCurve {
  ModeArray modes;
  double time = 0.0;

  FourierCurve() = default;
  explicit FourierCurve(ModeArray m, double t = 0.0) : modes(std::move(m)), time(t) {}

  static FourierCurve circle(int order) { return FourierCurve(ModeArray(order)); }

  int order() const { return modes.order(); }
};

/// X = a0 + a1 e^{is} + Y, with Y holding every mode except 0 and 1.
struct CurveSplit {
  Complex a0;
  Complex a1;
  ModeArray y;  // slots 0 and 1 are zero
};

inline CurveSplit split(const FourierCurve& curve) {
  CurveSplit out{curve.modes[0], curve.order() >= 1 ? curve.modes[1] : Complex{}, curve.modes};
  out.y[0] = 0.0;
  if (curve.order() >= 1) out.y[1] = 0.0;
  return out;
}

inline FourierCurve reassemble(const CurveSplit& parts, double time = 0.0) {
  FourierCurve curve(parts.y, time);
  curve.modes[0] = parts.a0;
  if (curve.order() >= 1) curve.modes[1] = parts.a1;
  return curve;
}

/// Coefficients i k a_k of X'. The full curve derivative adds i e^{is}.
inline ModeArray derivative(const ModeArray& modes) {
  ModeArray out(modes.order());
  for (int k = -modes.order(); k <= modes.order(); ++k) out[k] = imag_unit * double(k) * modes[k];
  return out;
}

/// Samples of the full curve at s_j = 2 pi j / M.
struct PhysicalGrid {
  std::vector<Complex> samples;

  int n_points() const { return int(samples.size()); }
  double node(int j) const { return two_pi * double(j) / double(samples.size()); }
};

inline void check_grid(int order, int n_points) {
  if (n_points <= 0 || n_points % 2 != 0) {
    throw std::invalid_argument("grid size must be a positive even integer, got " +
                                std::to_string(n_points));
  }
  if (n_points < 2 * order + 2) {
    throw std::invalid_argument("grid size " + std::to_string(n_points) +
                                " aliases modes up to K = " + std::to_string(order));
  }
}

/// Values of sum_k c_k e^{ik(s_j + shift)} at s_j = 2 pi j / M.
inline std::vector<Complex> modes_to_grid(const ModeArray& c, int n_points, double shift = 0.0) {
  check_grid(c.order(), n_points);
  std::vector<Complex> buffer(std::size_t(n_points), Complex{});
  for (int k = -c.order(); k <= c.order(); ++k) {
    const Complex phase = shift == 0.0 ? Complex(1.0) : std::polar(1.0, double(k) * shift);
    buffer[std::size_t((k + n_points) % n_points)] = c[k] * phase;
  }
  return fft::transform(buffer, fft::Direction::backward);
}

/// Discrete coefficients (1/M) sum_j f(s_j) e^{-i k s_j} for |k| <= K.
inline ModeArray grid_to_modes(std::span<const Complex> samples, int order) {
  const int n_points = int(samples.size());
  check_grid(order, n_points);
  const auto spectrum = fft::transform(samples, fft::Direction::forward);
  ModeArray out(order);
  for (int k = -order; k <= order; ++k) {
    out[k] = spectrum[std::size_t((k + n_points) % n_points)] / double(n_points);
  }
  return out;
}

inline PhysicalGrid synthesize(const FourierCurve& curve, int n_points) {
  PhysicalGrid grid{modes_to_grid(curve.modes, n_points)};
  for (int j = 0; j < n_points; ++j) grid.samples[std::size_t(j)] += std::polar(1.0, grid.node(j));
  return grid;
}

inline FourierCurve analyze(const PhysicalGrid& grid, int order) {
  std::vector<Complex> perturbation(grid.samples);
  for (int j = 0; j < grid.n_points(); ++j) perturbation[std::size_t(j)] -= std::polar(1.0, grid.node(j));
  return FourierCurve(grid_to_modes(perturbation, order));
}

/// Direct evaluation of sum_k c_k e^{iks} at one point.
inline Complex evaluate(const ModeArray& c, double s) {
  Complex acc{};
  for (int k = -c.order(); k <= c.order(); ++k) acc += c[k] * std::polar(1.0, double(k) * s);
  return acc;
}

/**
 * Difference quotient Y~(s, s - alpha)
 *   = e^{-is} e^{-i alpha/2} (Y(s - alpha) - Y(s)) / (2 sin(alpha/2)),
 * built from the Y part of the curve. For |alpha| < 1e-8 the removable
 * singularity is replaced by its limit -e^{-is} Y'(s).
 */
inline Complex y_tilde(const FourierCurve& curve, double s, double alpha) {
  const ModeArray y = split(curve).y;
  const Complex rot = std::polar(1.0, -s);
  if (std::abs(alpha) < 1e-8) return -rot * evaluate(derivative(y), s);
  const Complex diff = evaluate(y, s - alpha) - evaluate(y, s);
  return rot * std::polar(1.0, -alpha / 2.0) * diff / (2.0 * std::sin(alpha / 2.0));
}

/// Unnormalized squared L2 norm: integral of |f|^2 over the torus.
inline double l2_norm_squared(const ModeArray& c) {
  double acc = 0.0;
  for (const auto& v : c.values()) acc += std::norm(v);
  return two_pi * acc;
}

inline double l2_norm(const ModeArray& c) { return std::sqrt(l2_norm_squared(c)); }

/// Sup of |f| sampled on a grid of at least `oversample` points per mode.
inline double sup_norm(const ModeArray& c, int oversample = 8) {
  int n = 8;
  while (n < oversample * std::max(c.order(), 1)) n *= 2;
  double m = 0.0;
  for (const auto& v : modes_to_grid(c, n)) m = std::max(m, std::abs(v));
  return m;
}

// JSON snapshot: {"time": t, "K": K, "modes": [[re, im], ...]} ordered k = -K..K.
inline void to_json(nlohmann::json& j, const FourierCurve& curve) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& c : curve.modes.values()) modes.push_back({c.real(), c.imag()});
  j = nlohmann::json{{"time", curve.time}, {"K", curve.order()}, {"modes", std::move(modes)}};
}

inline void from_json(const nlohmann::json& j, FourierCurve& curve) {
  const int order = j.at("K").get<int>();
  const auto& modes = j.at("modes");
  if (order < 0 || modes.size() != std::size_t(2 * order + 1)) {
    throw std::invalid_argument("curve snapshot: expected 2K+1 modes");
  }
  ModeArray m(order);
  for (int k = -order; k <= order; ++k) {
    const auto& pair = modes.at(std::size_t(k + order));
    m[k] = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  curve = FourierCurve(std::move(m), j.at("time").get<double>());
}

/// CSV of the perturbation X on the grid: columns s, Re X, Im X.
inline void write_samples_csv(std::ostream& os, const FourierCurve& curve, int n_points) {
  const auto values = modes_to_grid(curve.modes, n_points);
  os << "s,re_X,im_X\n";
  os.precision(17);
  for (int j = 0; j < n_points; ++j) {
    os << two_pi * double(j) / double(n_points) << ',' << values[std::size_t(j)].real() << ','
       << values[std::size_t(j)].imag() << '\n';
  }
}

}  // namespace peskin
