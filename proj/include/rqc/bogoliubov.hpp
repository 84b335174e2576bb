#pragma once

// Bogolyubov coefficients between single-frequency right-Rindler modes
// (dimensionless Rindler frequency k_d1) and Minkowski plane waves
// (k_s1, |k_perp|), after the transverse delta functions have been resolved
// by the matched-beam assumption.

#include <cmath>
#include <complex>
#include <numbers>

#include "rqc/error.hpp"

namespace rqc::bogoliubov {

enum class TransverseCoupling {
  same,    ///< delta(k_d - k_s): particle-conserving
  reversed ///< delta(k_d + k_s): particle-creating
};

struct Coefficient {
  std::complex<double> value;
  TransverseCoupling transverse;
};

/// 1 / (1 - exp(-2 pi k)): weight of the particle-conserving channel.
inline double kernel_plus(double k) {
  return -1.0 / std::expm1(-2.0 * std::numbers::pi * k);
}

/// 1 / (exp(2 pi k) - 1): Unruh occupation at Rindler frequency k.
inline double kernel_minus(double k) {
  return 1.0 / std::expm1(2.0 * std::numbers::pi * k);
}

inline double minkowski_frequency(double k_s1, double k_perp) {
  return std::hypot(k_s1, k_perp);
}

/// ln((omega + k_s1) / (omega - k_s1)), evaluated without cancellation.
inline double rapidity_log(double k_s1, double k_perp) {
  const double w = minkowski_frequency(k_s1, k_perp);
  const double kp2 = k_perp * k_perp;
  const double plus = k_s1 >= 0.0 ? w + k_s1 : kp2 / (w - k_s1);
  const double minus = k_s1 <= 0.0 ? w - k_s1 : kp2 / (w + k_s1);
  return std::log(plus) - std::log(minus);
}

/// Exact phase of ((omega + k_s1)/(omega - k_s1))^{i k_d1 / 2}, in radians.
inline double exact_phase(double k_d1, double k_s1, double k_perp) {
  if (!(k_perp > 0.0))
    throw DomainError("exact Bogolyubov phase is singular for k_perp = 0; "
                      "use phase_approx");
  return 0.5 * k_d1 * rapidity_log(k_s1, k_perp);
}

namespace detail {
inline void check_args(double k_d1, double k_s1, double k_perp) {
  if (!(k_d1 > 0.0))
    throw DomainError("Rindler frequency must be > 0 (right wedge spectrum)");
  if (k_s1 == 0.0 && k_perp == 0.0)
    throw DomainError("Minkowski wavevector must be non-zero");
  if (!(k_perp > 0.0))
    throw DomainError("k_perp must be > 0 for the exact coefficient");
}
} // namespace detail

inline Coefficient a_coefficient(double k_d1, double k_s1, double k_perp) {
  detail::check_args(k_d1, k_s1, k_perp);
  const double w = minkowski_frequency(k_s1, k_perp);
  const double mod = std::sqrt(kernel_plus(k_d1) / (2.0 * std::numbers::pi * w));
  return {std::polar(mod, exact_phase(k_d1, k_s1, k_perp)),
          TransverseCoupling::same};
}

inline Coefficient b_coefficient(double k_d1, double k_s1, double k_perp) {
  detail::check_args(k_d1, k_s1, k_perp);
  const double w = minkowski_frequency(k_s1, k_perp);
  const double mod =
      std::sqrt(kernel_minus(k_d1) / (2.0 * std::numbers::pi * w));
  return {std::polar(mod, exact_phase(k_d1, k_s1, k_perp)),
          TransverseCoupling::reversed};
}

/// Paraxial, narrowband form of the Bogolyubov phase:
///   exp(+-i |k_s1/k_so| k_d1) exp(+-i k_d1 (ln 2|k_so| - ln(k_perp^2)/2 - 1)),
/// upper sign for k_so > 0. Diverges logarithmically as k_perp -> 0.
inline double approx_phase(double k_d1, double k_s1, double k_perp,
                           double k_so) {
  const double sign = k_so > 0.0 ? 1.0 : -1.0;
  const double carrier = std::abs(k_so);
  return sign * k_d1 *
         (std::abs(k_s1) / carrier + std::log(2.0 * carrier) -
          0.5 * std::log(k_perp * k_perp) - 1.0);
}

inline std::complex<double> phase_approx(double k_d1, double k_s1,
                                         double k_perp, double k_so) {
  return std::polar(1.0, approx_phase(k_d1, k_s1, k_perp, k_so));
}

/// Wraps a phase difference into (-pi, pi].
inline double wrap_phase(double d) {
  using std::numbers::pi;
  d = std::remainder(d, 2.0 * pi);
  return d <= -pi ? d + 2.0 * pi : d;
}

} // namespace rqc::bogoliubov
