#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "peskin/curve.hpp"
#include "peskin/kernels.hpp"
#include "peskin/nonlin.hpp"
#include "peskin/tension.hpp"

namespace peskin {

struct KernelCheckOptions {
  int identity_max_k = 64;
  int identity_points = 1024;
  int dual_samples = 50;
  std::uint64_t seed = 7;
  kernels::BoundLattice lattice;
  double identity_tolerance = 1e-12;
  double dual_tolerance = 1e-10;
  double refinement_tolerance = 0.2;
};

namespace detail {

inline nlohmann::json fit_json(const kernels::BoundFit& coarse, const kernels::BoundFit& fine,
                               double tolerance, bool& pass) {
  const double change = std::abs(fine.constant - coarse.constant) / coarse.constant;
  const bool ok = std::isfinite(coarse.constant) && std::isfinite(fine.constant) &&
                  coarse.constant > 0.0 && change <= tolerance;
  pass = pass && ok;
  return {{"constant", coarse.constant},
          {"constant_refined", fine.constant},
          {"relative_change", change},
          {"per_block", coarse.per_block},
          {"pass", ok}};
}

}  // namespace detail

/**
 * Pass/fail report for the torus kernels: the I_k, J_k identities, the
 * agreement of the two L_n formulas, and fitted constants of the L_n, L~_n
 * bounds together with their change when the (s, alpha) lattice is doubled.
 */
inline nlohmann::json kernel_report(const KernelCheckOptions& opt = {}) {
  namespace kn = kernels;
  nlohmann::json report;
  bool pass = true;

  double ik_err = 0.0, jk_err = 0.0;
  for (int k = -opt.identity_max_k; k <= opt.identity_max_k; ++k) {
    ik_err = std::max(ik_err, std::abs(kn::pv_quadrature_ik(k, opt.identity_points) - kn::ik_exact(k)));
    jk_err = std::max(jk_err, std::abs(kn::pv_quadrature_jk(k, opt.identity_points) - kn::jk_exact(k)));
  }
  const bool identities_ok = ik_err <= opt.identity_tolerance && jk_err <= opt.identity_tolerance;
  pass = pass && identities_ok;
  report["identities"] = {{"max_k", opt.identity_max_k},
                          {"M", opt.identity_points},
                          {"ik_max_error", ik_err},
                          {"jk_max_error", jk_err},
                          {"pass", identities_ok}};

  std::mt19937_64 gen(opt.seed);
  auto unit = [&] { return double(gen() >> 11) * 0x1.0p-53; };
  double dual_err = 0.0;
  for (int i = 0; i < opt.dual_samples; ++i) {
    const int n = int(gen() % 7);
    const double s = two_pi * unit();
    const double alpha = (2.0 * unit() - 1.0) * std::numbers::pi;
    dual_err = std::max(dual_err, std::abs(kn::l_kernel(n, s, alpha) - kn::l_kernel_sum(n, s, alpha)));
  }
  const bool dual_ok = dual_err <= opt.dual_tolerance;
  pass = pass && dual_ok;
  report["dual_formula"] = {{"samples", opt.dual_samples}, {"max_error", dual_err}, {"pass", dual_ok}};

  kn::BoundLattice fine = opt.lattice;
  fine.refinement = 2 * opt.lattice.refinement;
  nlohmann::json bounds;
  bounds["psi_d1"] = detail::fit_json(kn::fit_psi_bound(opt.lattice, 1), kn::fit_psi_bound(fine, 1),
                                      opt.refinement_tolerance, pass);
  bounds["L"] = detail::fit_json(kn::fit_l_bound(opt.lattice), kn::fit_l_bound(fine), opt.refinement_tolerance, pass);
  bounds["L_tilde"] = detail::fit_json(kn::fit_l_tilde_bound(opt.lattice), kn::fit_l_tilde_bound(fine),
                                       opt.refinement_tolerance, pass);
  bounds["L_tilde_small_alpha"] =
      detail::fit_json(kn::fit_l_tilde_small_alpha(opt.lattice), kn::fit_l_tilde_small_alpha(fine),
                       opt.refinement_tolerance, pass);
  bounds["dL_tilde"] = detail::fit_json(kn::fit_l_tilde_dalpha_bound(opt.lattice),
                                        kn::fit_l_tilde_dalpha_bound(fine), opt.refinement_tolerance, pass);
  report["bounds"] = bounds;
  report["max_block"] = opt.lattice.max_block;
  report["pass"] = pass;
  return report;
}

struct LinearizationOptions {
  int max_k = 12;
  double delta = 1e-6;
  int K = 16;
  int M = 128;
  double tolerance = 1e-6;
};

/// Central-difference derivative of N^ at the circle in the direction u e^{iks}.
inline ModeArray jacobian_column(const TensionLaw& law, int k, Complex u, const LinearizationOptions& opt) {
  ModeArray plus(opt.K), minus(opt.K);
  plus[k] = opt.delta * u;
  minus[k] = -opt.delta * u;
  ModeArray d = eval_nonlinearity(FourierCurve(plus), law, opt.M).modes;
  d -= eval_nonlinearity(FourierCurve(minus), law, opt.M).modes;
  d *= Complex(1.0 / (2.0 * opt.delta));
  return d;
}

/**
 * Compares finite-difference columns of the Jacobian of N at the circle with
 * the closed-form linear part, for |k| <= max_k and both real and imaginary
 * directions. The error of a column is max_j |D_j - c_j| / max(max_j |c_j|, 1).
 * Laws violating tension > 0, tension' > 0 fail the structural check first.
 */
inline nlohmann::json linearization_report(const TensionLaw& law, const LinearizationOptions& opt = {}) {
  nlohmann::json report;
  const StructuralReport structure = check_structure(law);
  report["law"] = law.label();
  report["structure"] = {{"positive", structure.positive},
                         {"derivative_consistent", structure.derivative_consistent},
                         {"max_derivative_rel_error", structure.max_derivative_rel_error},
                         {"tension_failures", structure.tension_failures},
                         {"derivative_failures", structure.derivative_failures}};
  if (!structure.ok()) {
    report["pass"] = false;
    report["reason"] = "structural conditions tension > 0, tension' > 0 violated";
    return report;
  }
  const LinearCoefficients coeffs = linear_coefficients(law, 0.0);
  double worst = 0.0;
  nlohmann::json columns = nlohmann::json::array();
  for (int k = -opt.max_k; k <= opt.max_k; ++k) {
    for (Complex u : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
      const ModeArray fd = jacobian_column(law, k, u, opt);
      ModeArray unit(opt.K);
      unit[k] = u;
      ModeArray closed = linear_part(unit, coeffs, 0.0);
      ModeArray diff = fd;
      diff -= closed;
      const double err = diff.max_abs() / std::max(closed.max_abs(), 1.0);
      worst = std::max(worst, err);
      columns.push_back({{"k", k}, {"direction", u.real() != 0.0 ? "real" : "imag"}, {"error", err}});
    }
  }
  report["columns"] = columns;
  report["max_relative_error"] = worst;
  report["tolerance"] = opt.tolerance;
  report["pass"] = worst <= opt.tolerance;
  return report;
}

}  // namespace peskin
