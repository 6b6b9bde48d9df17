#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peskin/errors.hpp"

namespace peskin {

/// Stretch interval on which a law is trusted. Evaluation outside it throws.
struct ValidityInterval {
  double r_min = 0.5;
  double r_max = 2.0;

  bool contains(double r) const { return r >= r_min && r <= r_max; }
};

/**
 * Elasticity law: tension as a function of the local stretch r = |X'|.
 *
 * The law and its derivative are both supplied analytically. Instances are
 * immutable and can be shared across threads.
 */
class TensionLaw {
 public:
  using Function = std::function<double(double)>;

  TensionLaw(std::string label, Function tension, Function derivative,
             ValidityInterval validity = {})
      : label_(std::move(label)),
        tension_(std::move(tension)),
        derivative_(std::move(derivative)),
        validity_(validity) {
    if (!(validity_.r_min > 0.0) || !(validity_.r_max > validity_.r_min)) {
      throw ConfigError("tension law '" + label_ + "': invalid validity interval");
    }
  }

  /// k0 * r
  static TensionLaw hookean(double stiffness = 1.0, ValidityInterval validity = {}) {
    if (!(stiffness > 0.0)) throw ConfigError("hookean law needs stiffness > 0");
    return TensionLaw(
        "hookean", [stiffness](double r) { return stiffness * r; },
        [stiffness](double) { return stiffness; }, validity);
  }

  /// r + c r^3
  static TensionLaw cubic(double c = 1.0, ValidityInterval validity = {}) {
    return TensionLaw(
        "cubic", [c](double r) { return r + c * r * r * r; },
        [c](double r) { return 1.0 + 3.0 * c * r * r; }, validity);
  }

  /// r^p, p > 0
  static TensionLaw power(double p, ValidityInterval validity = {}) {
    if (!(p > 0.0)) throw ConfigError("power law needs p > 0");
    return TensionLaw(
        "power", [p](double r) { return std::pow(r, p); },
        [p](double r) { return p * std::pow(r, p - 1.0); }, validity);
  }

  /// sum_i coeffs[i] r^i. No positivity is assumed, so this also expresses
  /// laws that violate the structural conditions (used by diagnostics).
  static TensionLaw polynomial(std::vector<double> coeffs, ValidityInterval validity = {}) {
    if (coeffs.empty()) throw ConfigError("polynomial law needs coefficients");
    auto value = [coeffs](double r) {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
      return acc;
    };
    auto deriv = [coeffs](double r) {
      double acc = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * r + double(i) * coeffs[i];
      return acc;
    };
    return TensionLaw("polynomial", value, deriv, validity);
  }

  double tension(double r) const {
    check(r);
    return tension_(r);
  }

  double derivative(double r) const {
    check(r);
    return derivative_(r);
  }

  bool admits(double r) const { return r > 0.0 && validity_.contains(r); }

  const std::string& label() const { return label_; }
  const ValidityInterval& validity() const { return validity_; }

 private:
  void check(double r) const {
    if (!admits(r)) {
      std::ostringstream msg;
      msg << "stretch " << r << " outside validity interval [" << validity_.r_min << ", "
          << validity_.r_max << "] of law '" << label_ << "'";
      throw TensionDomainError(msg.str());
    }
  }

  std::string label_;
  Function tension_;
  Function derivative_;
  ValidityInterval validity_;
};

/// T(r) = tension(r) / r
inline double small_t(const TensionLaw& law, double r) { return law.tension(r) / r; }

/// T'(r) = tension'(r) / r - tension(r) / r^2
inline double small_t_prime(const TensionLaw& law, double r) {
  return law.derivative(r) / r - law.tension(r) / (r * r);
}

/// Scalar coefficients of the linearization about the circle of radius |1 + a1|.
struct LinearCoefficients {
  double A = 0.0;              // T(|1+a1|)
  double B = 0.0;              // T'(|1+a1|)
  double b_tilde = 0.0;        // |1+a1| B
  double tension_deriv = 0.0;  // A + b_tilde, equal to tension'(|1+a1|)
};

inline LinearCoefficients linear_coefficients(const TensionLaw& law, std::complex<double> a1) {
  const double r = std::abs(1.0 + a1);
  LinearCoefficients c;
  c.A = small_t(law, r);
  c.B = small_t_prime(law, r);
  c.b_tilde = r * c.B;
  c.tension_deriv = c.A + c.b_tilde;
  return c;
}

/// Sampled check of tension > 0, tension' > 0 and of analytic-vs-differenced
/// derivative consistency over the validity interval.
struct StructuralReport {
  bool positive = true;
  bool derivative_consistent = true;
  double max_derivative_rel_error = 0.0;
  std::vector<double> tension_failures;     // r where tension(r) <= 0
  std::vector<double> derivative_failures;  // r where tension'(r) <= 0

  bool ok() const { return positive && derivative_consistent; }
};

inline StructuralReport check_structure(const TensionLaw& law, int samples = 257,
                                        double derivative_tolerance = 1e-6) {
  StructuralReport report;
  const auto [lo, hi] = law.validity();
  for (int i = 0; i < samples; ++i) {
    const double r = lo + (hi - lo) * double(i) / double(samples - 1);
    const double value = law.tension(r);
    const double deriv = law.derivative(r);
    if (!(value > 0.0)) report.tension_failures.push_back(r);
    if (!(deriv > 0.0)) report.derivative_failures.push_back(r);
  }
  // Central differences at cell midpoints so the stencil stays inside the interval.
  for (int i = 0; i + 1 < samples; ++i) {
    const double r = lo + (hi - lo) * (double(i) + 0.5) / double(samples - 1);
    const double h = 1e-5 * r;
    const double fd = (law.tension(r + h) - law.tension(r - h)) / (2.0 * h);
    const double deriv = law.derivative(r);
    const double err = std::abs(fd - deriv) / std::max(std::abs(deriv), 1.0);
    report.max_derivative_rel_error = std::max(report.max_derivative_rel_error, err);
  }
  report.positive = report.tension_failures.empty() && report.derivative_failures.empty();
  report.derivative_consistent = report.max_derivative_rel_error <= derivative_tolerance;
  return report;
}

}  // namespace peskin
