#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "peskin/initdata.hpp"
#include "peskin/integrator.hpp"
#include "peskin/kernels.hpp"
#include "peskin/linear.hpp"
#include "peskin/nonlin.hpp"
#include "peskin/norms.hpp"
#include "peskin/verify.hpp"

using namespace peskin;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

template <class... T>
std::string fmt(const char* f, T... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

Verdict kernel_identities() {
  double ik = 0.0, jk = 0.0;
  for (int k = -64; k <= 64; ++k) {
    ik = std::max(ik, std::abs(kernels::pv_quadrature_ik(k, 1024) - kernels::ik_exact(k)));
    jk = std::max(jk, std::abs(kernels::pv_quadrature_jk(k, 1024) - kernels::jk_exact(k)));
  }
  // Closed forms: I_k = -(i/2) sgn k with sgn 0 = +1, J_k = -|k|/2.
  double closed = 0.0;
  for (int k = -64; k <= 64; ++k) {
    closed = std::max(closed, std::abs(kernels::ik_exact(k) - Complex(0.0, k < 0 ? 0.5 : -0.5)));
    closed = std::max(closed, std::abs(kernels::jk_exact(k) + 0.5 * std::abs(k)));
  }
  return {ik <= 1e-12 && jk <= 1e-12 && closed <= 1e-15, fmt("max|I err|=%.2e max|J err|=%.2e", ik, jk)};
}

Verdict steady_states() {
  double worst = 0.0;
  for (const auto& law : {TensionLaw::hookean(), TensionLaw::cubic()}) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        ModeArray m(64);
        m[0] = std::polar(0.5 * i, 0.9 * j);
        m[1] = std::polar(0.3 * j / 4.0, 1.1 * i);
        const auto eval = eval_nonlinearity(FourierCurve(m), law, 512);
        for (const auto& v : eval.grid_values) worst = std::max(worst, std::abs(v));
      }
    }
  }
  return {worst <= 1e-10, fmt("max|N|=%.2e over 50 circles", worst)};
}

Verdict linearization() {
  bool pass = true;
  std::string detail;
  for (const auto& law : {TensionLaw::hookean(), TensionLaw::cubic()}) {
    const auto report = linearization_report(law);
    const double err = report["max_relative_error"].get<double>();
    pass = pass && report["pass"].get<bool>() && err <= 1e-6 && report["columns"].size() == 50;
    detail += fmt("%s rel=%.2e ", law.label().c_str(), err);
  }
  return {pass, detail};
}

Verdict spectrum() {
  double worst = 0.0;
  for (Complex a1 : {Complex(0.0), Complex(0.1), Complex(0.0, 0.1)}) {
    const auto c = linear_coefficients(TensionLaw::cubic(), a1);
    for (int m = 3; m <= 128; ++m) {
      const auto sys = build_pair_system(m, c, a1);
      const auto l = sys.scaled_eigenvalues();
      const double lo = 2.0 * c.A * (m - 1), hi = 2.0 * (c.A + c.b_tilde) * (m - 1);
      // Roots of the characteristic polynomial of -8G, computed directly.
      const Mat2 g = sys.G * Complex(-8.0);
      const Complex tr = g.a + g.d, det = g.a * g.d - g.b * g.c;
      const Complex disc = std::sqrt(tr * tr - 4.0 * det);
      const Complex r1 = 0.5 * (tr + disc), r2 = 0.5 * (tr - disc);
      const double big = std::max(std::abs(r1), std::abs(r2)), small = std::min(std::abs(r1), std::abs(r2));
      worst = std::max({worst, std::abs(l[0] - hi) / hi, std::abs(l[1] - lo) / lo, std::abs(big - hi) / hi,
                        std::abs(small - lo) / lo});
    }
  }
  return {worst <= 1e-12, fmt("max rel=%.2e", worst)};
}

double mode2_rate(const TensionLaw& law) {
  RunConfig cfg;
  cfg.law = law;
  cfg.K = 16;
  cfg.M = 64;
  cfg.t_end = 8.0;
  cfg.snapshot_every = 0.25;
  cfg.watch_modes = {2};
  cfg.init.kind = InitKind::single_mode;
  cfg.init.mode = 2;
  cfg.init.amplitude = 1e-4;
  const RunResult r = run(cfg);
  if (!r.ok()) return 0.0;
  std::vector<double> t, v;
  for (const auto& d : r.trajectory.diagnostics) {
    t.push_back(d.t);
    v.push_back(d.watched[0]);
  }
  return -fit_log_slope(t, v).slope;
}

Verdict mode2_decay() {
  const double h = mode2_rate(TensionLaw::hookean()), c = mode2_rate(TensionLaw::cubic());
  // The cubic law has T'(1) = 4, so the predicted rate is 1.
  const double cubic_expect = TensionLaw::cubic().derivative(1.0) / 4.0;
  const bool pass = std::abs(h / 0.25 - 1.0) <= 0.01 && std::abs(c / cubic_expect - 1.0) <= 0.01;
  return {pass, fmt("hookean %.5f (0.25) cubic %.5f (%.2f)", h, c, cubic_expect)};
}

struct CornerRun {
  RunResult result;
  DecayFit fit;
  Complex a0_initial, a1_initial;
};

CornerRun corner_run(double s_target) {
  RunConfig cfg;
  cfg.law = TensionLaw::cubic();
  cfg.K = 128;
  cfg.M = 512;
  cfg.t_end = 20.0;
  cfg.snapshot_every = 0.5;
  cfg.init.kind = InitKind::corner;
  cfg.init.positions = {0.0, 2.0};
  cfg.init.strengths = {1.0, 0.6};
  cfg.init.amplitude = 1.0;
  cfg.init.target = TargetNorm{"s", s_target};
  CornerRun out;
  out.result = run(cfg);
  if (!out.result.ok()) return out;
  out.fit = fit_decay(out.result.trajectory);
  out.a0_initial = out.result.trajectory.diagnostics.front().a0;
  out.a1_initial = out.result.trajectory.diagnostics.front().a1;
  return out;
}

Verdict nonlinear_stability() {
  const CornerRun full = corner_run(0.01), half = corner_run(0.005);
  if (!full.result.ok() || !half.result.ok()) return {false, "run failed: " + full.result.message + half.result.message};
  const auto& d = full.result.trajectory.diagnostics;

  bool monotone = true;
  std::vector<double> t, v;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].t < 1.0) continue;
    if (!t.empty() && !(d[i].l2_y < v.back())) monotone = false;
    t.push_back(d[i].t);
    v.push_back(d[i].l2_y);
  }
  const double rate = -fit_log_slope(t, v).slope;
  const auto coeffs = linear_coefficients(TensionLaw::cubic(), full.a1_initial);
  const double predicted = std::min(build_mode2_system(coeffs).rate, slowest_linear_rate(coeffs, full.a1_initial, 128));
  const bool rate_ok = std::abs(rate / predicted - 1.0) <= 0.1;

  const FourierCurve& last = full.result.trajectory.snapshots.back();
  ModeArray gap = last.modes;
  gap[0] -= full.fit.a0_limit;
  gap[1] -= full.fit.a1_limit;
  const double circle = sup_norm(gap, 8);

  const double r0 = std::abs(full.fit.a0_limit - full.a0_initial) / std::abs(half.fit.a0_limit - half.a0_initial);
  const double r1 = std::abs(full.fit.a1_limit - full.a1_initial) / std::abs(half.fit.a1_limit - half.a1_initial);
  const bool pass = monotone && rate_ok && circle <= 1e-6 && in_range(r0, 3.3, 4.7) && in_range(r1, 3.3, 4.7);
  return {pass, fmt("monotone=%d rate %.4f (pred %.4f) circle %.1e shift ratios a0 %.3f a1 %.3f", int(monotone), rate,
                    predicted, circle, r0, r1)};
}

Verdict residual_smallness() {
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto residual = [&](double eps) {
      const ModeArray y = make_random_decay(32, 2.5, seed, eps).modes;
      return eval_residual(FourierCurve(y), TensionLaw::cubic(), 128).max_abs();
    };
    const double ratio = residual(1e-3) / residual(5e-4);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo >= 3.5 && hi <= 4.5, fmt("ratios in [%.4f, %.4f]", lo, hi)};
}

Verdict kernel_bounds() {
  KernelCheckOptions opt;
  opt.lattice.max_block = 6;
  const auto report = kernel_report(opt);
  bool pass = true;
  std::string detail;
  for (const char* name : {"L", "L_tilde", "dL_tilde"}) {
    const auto& b = report["bounds"][name];
    pass = pass && b["pass"].get<bool>() && b["relative_change"].get<double>() <= 0.2;
    detail += fmt("%s C=%.3g change %.1f%% ", name, b["constant"].get<double>(),
                  100.0 * b["relative_change"].get<double>());
  }
  return {pass, detail};
}

Verdict norm_products() {
  const auto conv = convolution_suite(50, 32, 11, 1), conv_fine = convolution_suite(50, 32, 11, 2);
  const auto alg = z1_algebra_suite(30, 5, 11, 1), alg_fine = z1_algebra_suite(30, 5, 11, 2);
  const double dc = std::abs(conv_fine.constant / conv.constant - 1.0);
  const double da = std::abs(alg_fine.constant / alg.constant - 1.0);
  const bool pass = std::isfinite(conv.constant) && std::isfinite(alg.constant) && dc <= 0.5 && da <= 0.5;
  return {pass, fmt("conv C=%.3g change %.1f%% z1 C=%.3g change %.1f%%", conv.constant, 100.0 * dc, alg.constant,
                    100.0 * da)};
}

Verdict integrator_order() {
  auto end_state = [](double dt) {
    RunConfig cfg;
    cfg.law = TensionLaw::cubic();
    cfg.K = 32;
    cfg.M = 128;
    cfg.t_end = 1.0;
    cfg.dt = dt;
    cfg.snapshot_every = 1.0;
    cfg.init.kind = InitKind::random_decay;
    cfg.init.exponent = 3.0;
    cfg.init.seed = 7;
    cfg.init.amplitude = 0.01;
    return run(cfg).trajectory.snapshots.back().modes;
  };
  const ModeArray ref = end_state(0.1 / 8.0);
  const double e1 = (end_state(0.1) - ref).max_abs(), e2 = (end_state(0.05) - ref).max_abs();
  const double ratio = e1 / e2;
  return {in_range(ratio, 3.5, 4.5), fmt("error ratio %.4f", ratio)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {"kernel identities", 1.0, kernel_identities},
      {"steady states", 10.0, steady_states},
      {"linearization", 30.0, linearization},
      {"pair spectrum", 1.0, spectrum},
      {"mode-2 decay", 60.0, mode2_decay},
      {"nonlinear stability (corner data)", 600.0, nonlinear_stability},
      {"residual quadratic smallness", 60.0, residual_smallness},
      {"kernel bound constants", 120.0, kernel_bounds},
      {"norm product suites", 120.0, norm_products},
      {"integrator order", 120.0, integrator_order},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = v.pass && seconds <= criteria[i].budget_seconds;
    if (!pass) ++failures;
    std::printf("%s %2zu %s: %s [%.2fs / %.0fs]\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name, v.detail.c_str(),
                seconds, criteria[i].budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
