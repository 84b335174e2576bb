#pragma once

// Minkowski/Rindler coordinates for the right wedge and the null-ray geometry
// linking Alice's emission events to Rob's worldline. Units: c = hbar = 1.

#include <cmath>

#include "rqc/error.hpp"

namespace rqc::kinematics {

/// Uniformly accelerated observer pinned at xi = 0 of the Rindler chart.
struct AcceleratedObserver {
  double a; ///< proper acceleration (inverse length)

  explicit AcceleratedObserver(double acceleration) : a(acceleration) {
    if (!(acceleration > 0.0) || !std::isfinite(acceleration))
      throw DomainError("acceleration must be finite and > 0");
  }
};

/// Emission point of a left-moving pulse on the beam axis.
struct EmissionEvent {
  double x;
  double t;
};

struct MinkowskiPoint {
  double x;
  double t;
};

inline MinkowskiPoint rindler_to_minkowski(double xi, double tau, double a) {
  if (!(a > 0.0))
    throw DomainError("rindler_to_minkowski: acceleration must be > 0");
  const double r = std::exp(a * xi) / a;
  return {r * std::cosh(a * tau), r * std::sinh(a * tau)};
}

/// Null coordinate x + t, conserved along a left-moving light ray.
constexpr double emission_invariant(const EmissionEvent &event) noexcept {
  return event.x + event.t;
}

/// Proper time at which Rob (xi = 0) crosses the ray with invariant T.
inline double reception_proper_time(double T, double a) {
  if (!(a > 0.0))
    throw DomainError("reception_proper_time: acceleration must be > 0");
  if (!(T > 0.0))
    throw HorizonError(T);
  return std::log(a * T) / a;
}

/// Rob's velocity when the ray with invariant T reaches him.
inline double reception_velocity(double T, double a) {
  return std::tanh(a * reception_proper_time(T, a));
}

/// T = (1/a) sqrt((1+v)/(1-v)) for a ray met where Rob moves at velocity v.
inline double doppler_invariant(double v, double a) {
  if (!(a > 0.0))
    throw DomainError("doppler_invariant: acceleration must be > 0");
  if (!(std::abs(v) < 1.0))
    throw DomainError("doppler_invariant: |v| must be < 1");
  return std::sqrt((1.0 + v) / (1.0 - v)) / a;
}

} // namespace rqc::kinematics
