#pragma once

// Source and detector mode functions. The source is factored into a
// longitudinal envelope around the carrier k_so (left-moving, k_so < 0) and a
// transverse profile that is taken to be perfectly matched to the detector.
// The detector is flat in Rindler frequency on (k_min, k_max].

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "rqc/error.hpp"
#include "rqc/kinematics.hpp"

namespace rqc {

enum class Envelope { gaussian, sech };

inline std::string_view to_string(Envelope e) {
  return e == Envelope::gaussian ? "gaussian" : "sech";
}

inline Envelope envelope_from_string(std::string_view name) {
  if (name == "gaussian")
    return Envelope::gaussian;
  if (name == "sech")
    return Envelope::sech;
  throw DomainError("unknown envelope '" + std::string(name) + "'");
}

/// Transverse sector. Source and detector are assumed matched, so the only
/// number that survives is the reference transverse wavenumber entering the
/// Bogolyubov phase.
struct TransverseProfile {
  double k_perp = 1.0;

  void check() const {
    if (!(k_perp > 0.0) || !std::isfinite(k_perp))
      throw DomainError("transverse k_perp must be finite and > 0");
  }
};

class SourceProfile {
public:
  SourceProfile(double k_so, double sigma, kinematics::EmissionEvent origin,
                Envelope shape = Envelope::gaussian,
                TransverseProfile transverse = {})
      : k_so_(k_so), sigma_(sigma), origin_(origin), shape_(shape),
        transverse_(transverse) {
    if (!(k_so < 0.0) || !std::isfinite(k_so))
      throw DomainError("source carrier k_so must be finite and < 0 "
                        "(left-moving pulses only)");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw DomainError("source bandwidth sigma must be finite and > 0");
    transverse_.check();
  }

  [[nodiscard]] double k_so() const noexcept { return k_so_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }
  [[nodiscard]] Envelope shape() const noexcept { return shape_; }
  [[nodiscard]] const kinematics::EmissionEvent &origin() const noexcept {
    return origin_;
  }
  [[nodiscard]] const TransverseProfile &transverse() const noexcept {
    return transverse_;
  }
  [[nodiscard]] double invariant() const noexcept {
    return kinematics::emission_invariant(origin_);
  }

  [[nodiscard]] SourceProfile with_origin(kinematics::EmissionEvent e) const {
    return {k_so_, sigma_, e, shape_, transverse_};
  }
  [[nodiscard]] SourceProfile with_sigma(double sigma) const {
    return {k_so_, sigma, origin_, shape_, transverse_};
  }

  /// Real envelope as a function of the detuning k_s1 - k_so, with unit
  /// L2 norm. sigma is the standard deviation of |envelope|^2.
  [[nodiscard]] double envelope(double detuning) const {
    using std::numbers::pi;
    if (shape_ == Envelope::gaussian) {
      const double z = detuning / sigma_;
      return std::pow(2.0 * pi * sigma_ * sigma_, -0.25) *
             std::exp(-0.25 * z * z);
    }
    const double w = sech_width();
    return 1.0 / (std::sqrt(2.0 * w) * std::cosh(detuning / w));
  }

  /// Detuning beyond which the envelope is negligible in double precision.
  [[nodiscard]] double support_halfwidth() const noexcept {
    return shape_ == Envelope::gaussian ? 12.0 * sigma_ : 40.0 * sech_width();
  }

  /// Full longitudinal mode function f_j(k_s1), including the propagation
  /// phase exp(-i(omega t - k x)) = exp(-i|k_s1| T) of a left-mover emitted
  /// at the stored origin. |k_s1| is continued linearly (-k_s1) through the
  /// support so the envelope may be treated as living on the whole line.
  [[nodiscard]] std::complex<double> evaluate_longitudinal(double k_s1) const {
    const double env = envelope(k_s1 - k_so_);
    return std::polar(env, k_s1 * invariant());
  }

  /// |F(u)| / |F(0)| for the Fourier transform F of the envelope.
  [[nodiscard]] double transform_ratio(double u) const {
    using std::numbers::pi;
    if (shape_ == Envelope::gaussian)
      return std::exp(-sigma_ * sigma_ * u * u);
    return 1.0 / std::cosh(0.5 * pi * sech_width() * u);
  }

  /// Smallest u with (|F(u)| / |F(0)|)^2 below 1e-18.
  [[nodiscard]] double transform_cutoff() const {
    using std::numbers::pi;
    if (shape_ == Envelope::gaussian)
      return std::sqrt(9.0 * std::log(10.0)) / sigma_;
    return 2.0 * std::acosh(1e9) / (pi * sech_width());
  }

private:
  // sech^2(x/w)/(2w) has variance pi^2 w^2 / 12.
  [[nodiscard]] double sech_width() const noexcept {
    return sigma_ * std::sqrt(12.0) / std::numbers::pi;
  }

  double k_so_;
  double sigma_;
  kinematics::EmissionEvent origin_;
  Envelope shape_;
  TransverseProfile transverse_;
};

/// Broadband homodyne detector. k_max <= 0 and tau_window <= 0 mean "choose
/// automatically" in the overlap engine.
struct DetectorProfile {
  double k_min = 0.0;
  double k_max = 0.0;
  double tau_window = 0.0;
  TransverseProfile transverse{};

  [[nodiscard]] bool in_band(double k_d1) const noexcept {
    return k_d1 > k_min && (k_max <= 0.0 || k_d1 <= k_max);
  }
  [[nodiscard]] double longitudinal(double k_d1) const noexcept {
    return in_band(k_d1) ? 1.0 / std::sqrt(2.0 * std::numbers::pi) : 0.0;
  }
  /// Integral of |f_i|^2 over the band; requires an explicit k_max.
  [[nodiscard]] double band_norm() const {
    if (!(k_max > k_min))
      throw DomainError("detector band_norm needs k_max > k_min");
    return (k_max - k_min) / (2.0 * std::numbers::pi);
  }
  void check() const {
    if (!(k_min >= 0.0) || !std::isfinite(k_min))
      throw DomainError("detector k_min must be finite and >= 0");
    if (k_max > 0.0 && !(k_max > k_min))
      throw DomainError("detector k_max must exceed k_min");
    transverse.check();
  }
};

struct ValidityThresholds {
  double narrowband_max = 0.1;  ///< sigma / |k_so|
  double delta_min = 5.0;       ///< sigma * T
  double paraxial_max = 0.1;    ///< k_perp / |k_so|
  double infrared_max = 1e-6;   ///< detector weight at k_min relative to peak
};

struct ValidityReport {
  double narrowband_ratio = 0.0;
  double delta_product = 0.0;
  double paraxial_ratio = 0.0;
  double infrared_weight = 0.0;
  bool horizon_ok = false;
  bool narrowband_ok = false;
  bool delta_ok = false;
  bool paraxial_ok = false;
  bool infrared_ok = false;
  bool transverse_matched = true;

  [[nodiscard]] bool all_ok() const noexcept {
    return horizon_ok && narrowband_ok && delta_ok && paraxial_ok &&
           infrared_ok && transverse_matched;
  }

  /// Compact "name:ok|violated" list, ';'-separated.
  [[nodiscard]] std::string flags() const {
    auto item = [](const char *name, bool ok) {
      return std::string(name) + (ok ? ":ok" : ":violated");
    };
    return item("horizon", horizon_ok) + ";" +
           item("narrowband", narrowband_ok) + ";" + item("delta", delta_ok) +
           ";" + item("paraxial", paraxial_ok) + ";" +
           item("infrared", infrared_ok);
  }
};

/// Checks the approximations behind the closed-form channel: narrow band,
/// a pulse short against the distance to the horizon (sigma T >> 1, needed
/// for the delta-function reduction), paraxial propagation, and negligible
/// detector weight at the infrared edge of the Rindler spectrum.
inline ValidityReport validity_report(const SourceProfile &src,
                                      const DetectorProfile &det, double T,
                                      const ValidityThresholds &th = {}) {
  ValidityReport r;
  const double k0 = std::abs(src.k_so());
  r.narrowband_ratio = src.sigma() / k0;
  r.delta_product = src.sigma() * T;
  r.paraxial_ratio = src.transverse().k_perp / k0;
  r.horizon_ok = T > 0.0;
  // The detected weight |g_A(k)|^2 is the squared envelope transform at
  // u = T - k / |k_so|.
  const double u = T - det.k_min / k0;
  const double ratio = src.transform_ratio(u);
  r.infrared_weight = r.horizon_ok ? ratio * ratio : 1.0;
  r.narrowband_ok = r.narrowband_ratio <= th.narrowband_max;
  r.delta_ok = r.delta_product >= th.delta_min;
  r.paraxial_ok = r.paraxial_ratio <= th.paraxial_max;
  r.infrared_ok = r.infrared_weight <= th.infrared_max;
  return r;
}

} // namespace rqc
