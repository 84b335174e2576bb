#pragma once

// Closed-form relativistic homodyne channel. Everything depends on the single
// dimensionless parameter kappa = 2 pi |k_so| T: the channel is a
// phase-insensitive amplifier of gain G = 1 / (1 - e^{-kappa}) with vacuum
// idler, followed by receiver loss of transmissivity eta.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rqc/error.hpp"
#include "rqc/kinematics.hpp"

namespace rqc::channel {

inline double kappa(double k_so, double T) {
  if (k_so == 0.0 || !std::isfinite(k_so))
    throw DomainError("carrier k_so must be finite and non-zero");
  if (!(T > 0.0))
    throw HorizonError(T);
  return 2.0 * std::numbers::pi * std::abs(k_so) * T;
}

inline double gain_from_kappa(double kappa) {
  if (!(kappa > 0.0))
    throw DomainError("kappa must be > 0");
  return -1.0 / std::expm1(-kappa);
}

inline double effective_gain(double k_so, double T) {
  return gain_from_kappa(kappa(k_so, T));
}

struct ChannelParams {
  double kappa;
  double q;   ///< e^{-kappa}
  double G;
  double eta; ///< receiver transmissivity in (0, 1]
  std::complex<double> alpha{0.0, 0.0};
  double phi = 0.0;

  static ChannelParams from_kappa(double kappa, double eta = 1.0,
                                  std::complex<double> alpha = {},
                                  double phi = 0.0) {
    if (!(eta > 0.0 && eta <= 1.0))
      throw DomainError("efficiency eta must lie in (0, 1]");
    return {kappa, std::exp(-kappa), gain_from_kappa(kappa), eta, alpha, phi};
  }

  static ChannelParams from_geometry(double k_so, double T, double eta = 1.0,
                                     std::complex<double> alpha = {},
                                     double phi = 0.0) {
    return from_kappa(channel::kappa(k_so, T), eta, alpha, phi);
  }
};

/// <X_B(phi)> = (alpha e^{i phi} + c.c.) sqrt(G), scaled by sqrt(eta).
inline double mean_quadrature(const ChannelParams &p) {
  const double projected =
      2.0 * std::real(p.alpha * std::polar(1.0, p.phi));
  return projected * std::sqrt(p.G * p.eta);
}

/// (1 + q) / (1 - q) = coth(kappa / 2) at unit efficiency, then loss-mixed
/// with vacuum: eta V + (1 - eta).
inline double quadrature_variance(const ChannelParams &p) {
  const double v = 1.0 / std::tanh(0.5 * p.kappa);
  return p.eta * v + (1.0 - p.eta);
}

struct DopplerPoint {
  double v;
  double T;
  double G;
};

/// Gain seen by Rob for rays that meet him while he moves at each velocity.
inline std::vector<DopplerPoint>
doppler_gain_profile(double a, double k_so, const std::vector<double> &v_list) {
  std::vector<DopplerPoint> out;
  out.reserve(v_list.size());
  for (double v : v_list) {
    const double T = kinematics::doppler_invariant(v, a);
    out.push_back({v, T, effective_gain(k_so, T)});
  }
  return out;
}

} // namespace rqc::channel
