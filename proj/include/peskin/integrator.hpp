#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "peskin/curve.hpp"
#include "peskin/errors.hpp"
#include "peskin/initdata.hpp"
#include "peskin/linear.hpp"
#include "peskin/nonlin.hpp"
#include "peskin/tension.hpp"

namespace peskin {

struct RunConfig {
  TensionLaw law = TensionLaw::hookean();
  InitialDataSpec init;
  int K = 128;
  int M = 512;
  std::optional<double> dt;  // default 0.5 / fastest linear rate
  double t_end = 1.0;
  double snapshot_every = 0.1;
  bool frozen_coefficients = true;
  std::vector<int> watch_modes{2, 3, -1};
  int threads = 1;

  void validate() const {
    if (K < 2) throw ConfigError("K must be at least 2");
    if (M < 4 * K || M % 2 != 0) {
      throw ConfigError("M must be even and at least 4K (got M = " + std::to_string(M) +
                        ", K = " + std::to_string(K) + ")");
    }
    if (dt && !(*dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (dt && t_end < *dt) throw ConfigError("t_end must be at least dt");
    if (!(snapshot_every > 0.0)) throw ConfigError("snapshot_every must be positive");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    for (int k : watch_modes) {
      if (std::abs(k) > K) throw ConfigError("watch mode " + std::to_string(k) + " exceeds K");
    }
  }
};

struct Diagnostics {
  double t = 0.0;
  std::vector<double> watched;  // |a_k| for the configured watch list
  double l2_y = 0.0;
  double linf_yprime = 0.0;
  Complex a0, a1;
  double residual_max = 0.0;  // max_k |N^_k - c_k| with the stepping coefficients
};

struct Trajectory {
  std::vector<int> watch_modes;
  std::vector<FourierCurve> snapshots;
  std::vector<Diagnostics> diagnostics;
};

inline Diagnostics diagnose(const FourierCurve& curve, const std::vector<int>& watch,
                            double residual_max) {
  const CurveSplit parts = split(curve);
  Diagnostics d;
  d.t = curve.time;
  for (int k : watch) d.watched.push_back(std::abs(curve.modes.at(k)));
  d.l2_y = l2_norm(parts.y);
  d.linf_yprime = sup_norm(derivative(parts.y), 8);
  d.a0 = parts.a0;
  d.a1 = parts.a1;
  d.residual_max = residual_max;
  return d;
}

/// Columns: t, abs_a<k> per watched mode, l2_Y, linf_Yprime, a0_re, a0_im, a1_re, a1_im.
inline void write_diagnostics_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (int k : traj.watch_modes) os << ",abs_a" << k;
  os << ",l2_Y,linf_Yprime,a0_re,a0_im,a1_re,a1_im\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& d : traj.diagnostics) {
    put(d.t);
    for (double w : d.watched) {
      os << ',';
      put(w);
    }
    for (double v : {d.l2_y, d.linf_yprime, d.a0.real(), d.a0.imag(), d.a1.real(), d.a1.imag()}) {
      os << ',';
      put(v);
    }
    os << '\n';
  }
}

/**
 * Exponential weights for one step of size dt with the linear part frozen at
 * a reference a1. Slots: modes 0 and 1 (no linear part), mode 2 and the two
 * modes whose partner 2 - k lies beyond K (scalar), pairs (a_m, conj a_{2-m})
 * for 3 <= m <= K.
 */
class LinearStepper {
 public:
  LinearStepper(const TensionLaw& law, Complex a1_ref, int order, double dt)
      : order_(order), dt_(dt), a1_(a1_ref), coeffs_(linear_coefficients(law, a1_ref)) {
    auto add_scalar = [&](int k, double rate) {
      const Complex z = -rate * dt;
      scalars_.push_back({k, std::exp(z), phi1(z), phi2(z)});
    };
    add_scalar(0, 0.0);
    add_scalar(1, 0.0);
    add_scalar(2, build_mode2_system(coeffs_).rate);
    for (int k = -order; k <= std::min(1 - order, -1); ++k) add_scalar(k, unpaired_rate(k, coeffs_));
    for (int m = 3; m <= order; ++m) {
      const ModePairSystem sys = build_pair_system(m, coeffs_, a1_ref);
      pairs_.push_back({m, exp_pair(sys, dt), phi1_pair(sys, dt), phi2_pair(sys, dt)});
    }
  }

  double dt() const { return dt_; }
  const LinearCoefficients& coefficients() const { return coeffs_; }

  /// c_k of the frozen linear operator applied to the Y part of `modes`.
  ModeArray linear(const ModeArray& modes) const {
    ModeArray y = modes;
    y[0] = 0.0;
    y[1] = 0.0;
    return linear_part(y, coeffs_, a1_);
  }

  /// E u + dt phi1 f
  ModeArray predict(const ModeArray& u, const ModeArray& f) const {
    ModeArray out(order_);
    for (const auto& s : scalars_) out[s.k] = s.e * u[s.k] + dt_ * s.p1 * f[s.k];
    for (const auto& p : pairs_) {
      const Vec2 eu = p.e * pair(u, p.m), pf = p.p1 * pair(f, p.m);
      assign(out, p.m, {eu[0] + dt_ * pf[0], eu[1] + dt_ * pf[1]});
    }
    return out;
  }

  /// a + dt phi2 (f1 - f0)
  ModeArray correct(const ModeArray& a, const ModeArray& f0, const ModeArray& f1) const {
    ModeArray out(order_);
    for (const auto& s : scalars_) out[s.k] = a[s.k] + dt_ * s.p2 * (f1[s.k] - f0[s.k]);
    for (const auto& p : pairs_) {
      const Vec2 d1 = pair(f1, p.m), d0 = pair(f0, p.m);
      const Vec2 corr = p.p2 * Vec2{d1[0] - d0[0], d1[1] - d0[1]};
      const Vec2 base = pair(a, p.m);
      assign(out, p.m, {base[0] + dt_ * corr[0], base[1] + dt_ * corr[1]});
    }
    return out;
  }

 private:
  struct Scalar {
    int k;
    Complex e, p1, p2;
  };
  struct Pair {
    int m;
    Mat2 e, p1, p2;
  };

  static Vec2 pair(const ModeArray& u, int m) { return {u[m], std::conj(u[2 - m])}; }
  static void assign(ModeArray& u, int m, const Vec2& v) {
    u[m] = v[0];
    u[2 - m] = std::conj(v[1]);
  }

  int order_;
  double dt_;
  Complex a1_;
  LinearCoefficients coeffs_;
  std::vector<Scalar> scalars_;
  std::vector<Pair> pairs_;
};

/// F(u) = N^(u) - L u, the forcing seen by the exponential integrator.
inline ModeArray forcing(const FourierCurve& curve, const TensionLaw& law, const LinearStepper& stepper,
                         int quadrature_M, const EvalOptions& options) {
  ModeArray f = eval_nonlinearity(curve, law, quadrature_M, options).modes;
  f -= stepper.linear(curve.modes);
  return f;
}

namespace detail {

/// |a_k| may grow at most tenfold per step; the floor keeps modes that start
/// at zero (or at rounding level) from tripping the guard.
inline void blow_up_guard(const ModeArray& before, const ModeArray& after, double t) {
  const double floor = std::max(1e-14, 0.01 * before.max_abs());
  for (int k = -before.order(); k <= before.order(); ++k) {
    const double limit = 10.0 * std::max(std::abs(before[k]), floor);
    if (!(std::abs(after[k]) <= limit)) {
      std::ostringstream msg;
      msg << "step at t = " << t << ": |a_" << k << "| grew from " << std::abs(before[k]) << " to "
          << std::abs(after[k]);
      throw StepRejected(msg.str());
    }
  }
}

}  // namespace detail

/**
 * One ETD-RK2 step (Cox-Matthews):
 *   a   = e^{L dt} u + dt phi1(L dt) F(u)
 *   u+  = a + dt phi2(L dt) (F(a) - F(u))
 * `f0` is F(u) if already known.
 */
inline FourierCurve step(const FourierCurve& curve, const TensionLaw& law, const LinearStepper& stepper,
                         int quadrature_M, const EvalOptions& options,
                         const ModeArray* f0_known = nullptr) {
  const ModeArray f0 = f0_known ? *f0_known : forcing(curve, law, stepper, quadrature_M, options);
  const FourierCurve predicted(stepper.predict(curve.modes, f0), curve.time + stepper.dt());
  const ModeArray f1 = forcing(predicted, law, stepper, quadrature_M, options);
  FourierCurve next(stepper.correct(predicted.modes, f0, f1), curve.time + stepper.dt());
  detail::blow_up_guard(curve.modes, next.modes, curve.time);
  return next;
}

inline double default_step(const RunConfig& cfg, Complex a1) {
  return 0.5 / fastest_linear_rate(linear_coefficients(cfg.law, a1), a1, cfg.K);
}

struct RunResult {
  Trajectory trajectory;
  double dt = 0.0;
  std::optional<ErrorKind> failure;
  std::string message;

  bool ok() const { return !failure.has_value(); }
};

/// Integrates from `initial` to cfg.t_end. Errors end the run and are
/// reported with the partial trajectory.
inline RunResult run(const RunConfig& cfg, FourierCurve initial) {
  cfg.validate();
  RunResult result;
  result.trajectory.watch_modes = cfg.watch_modes;
  FourierCurve u = std::move(initial);
  u.modes = u.modes.resized(cfg.K);
  u.time = 0.0;
  const EvalOptions options{cfg.threads};
  try {
    const Complex a1_0 = split(u).a1;
    const double dt_target = cfg.dt.value_or(default_step(cfg, a1_0));
    const long n_steps = std::max(1L, long(std::ceil(cfg.t_end / dt_target - 1e-9)));
    const double dt = cfg.t_end / double(n_steps);
    const long stride = std::max(1L, std::lround(cfg.snapshot_every / dt));
    result.dt = dt;

    std::optional<LinearStepper> stepper;
    stepper.emplace(cfg.law, a1_0, cfg.K, dt);
    for (long i = 0;; ++i) {
      if (!cfg.frozen_coefficients && i > 0) stepper.emplace(cfg.law, split(u).a1, cfg.K, dt);
      const ModeArray f0 = forcing(u, cfg.law, *stepper, cfg.M, options);
      if (i % stride == 0 || i == n_steps) {
        result.trajectory.snapshots.push_back(u);
        result.trajectory.diagnostics.push_back(diagnose(u, cfg.watch_modes, f0.max_abs()));
      }
      if (i == n_steps) break;
      u = step(u, cfg.law, *stepper, cfg.M, options, &f0);
      u.time = double(i + 1) * dt;
    }
  } catch (const Error& e) {
    result.failure = e.kind();
    result.message = e.what();
  }
  return result;
}

inline RunResult run(const RunConfig& cfg) {
  cfg.validate();
  return run(cfg, generate(cfg.init, cfg.K).curve);
}

/// Least-squares slope and rms residual of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  if (x.size() < 2) throw InsufficientDecay("need at least two samples to fit a rate");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Decay rate -d/dt log(values) fitted on samples with t >= t_from.
inline LineFit fit_log_slope(const std::vector<double>& t, const std::vector<double>& values,
                             double t_from = 0.0) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from || !(values[i] > 0.0)) continue;
    x.push_back(t[i]);
    y.push_back(std::log(values[i]));
  }
  return fit_line(x, y);
}

/// Aitken extrapolation of the last three values; falls back to the last value.
inline Complex aitken_limit(Complex x0, Complex x1, Complex x2) {
  const Complex d1 = x1 - x0, d2 = x2 - x1;
  const Complex denom = d2 - d1;
  if (std::abs(denom) <= 1e-14 * std::max(std::abs(d2), 1e-300) || std::abs(denom) == 0.0) return x2;
  const Complex limit = x2 - d2 * d2 / denom;
  // Reject extrapolations that move further than the last increment suggests.
  if (!std::isfinite(limit.real()) || !std::isfinite(limit.imag()) ||
      std::abs(limit - x2) > 10.0 * std::abs(d2) + 1e-300) {
    return x2;
  }
  return limit;
}

struct DecayFit {
  double rate = 0.0;
  double fit_residual = 0.0;
  Complex a0_limit, a1_limit;
};

inline DecayFit fit_decay(const Trajectory& traj) {
  const auto& d = traj.diagnostics;
  if (d.size() < 3) throw InsufficientDecay("trajectory has fewer than three snapshots");
  const double first = d.front().l2_y, last = d.back().l2_y;
  if (!(first > 0.0) || !(last > 0.0) || first / last < std::exp(2.0)) {
    std::ostringstream msg;
    msg << "||Y||_L2 dropped from " << first << " to " << last << ", less than a factor e^2";
    throw InsufficientDecay(msg.str());
  }
  std::vector<double> t, v;
  for (const auto& row : d) {
    t.push_back(row.t);
    v.push_back(row.l2_y);
  }
  const LineFit line = fit_log_slope(t, v, 0.5 * d.back().t);
  const std::size_t n = d.size();
  return {-line.slope, line.rms_residual, aitken_limit(d[n - 3].a0, d[n - 2].a0, d[n - 1].a0),
          aitken_limit(d[n - 3].a1, d[n - 2].a1, d[n - 1].a1)};
}

}  // namespace peskin
