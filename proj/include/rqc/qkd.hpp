#pragma once

// Asymptotic secret key rate of Gaussian-modulated coherent-state CV-QKD with
// homodyne detection and reverse reconciliation, against collective attacks,
// over the relativistic amplifier channel followed by receiver loss. Eve
// holds the purification of both the amplifier and the loss environments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "rqc/channel.hpp"
#include "rqc/error.hpp"
#include "rqc/gaussian.hpp"

namespace rqc::qkd {

struct KeyRateResult {
  double i_ab = 0.0;     ///< Alice-Bob mutual information, bits/use
  double chi_be = 0.0;   ///< Holevo bound on Eve's information, bits/use
  double raw_rate = 0.0; ///< beta I_AB - chi_BE before clamping
  double key_rate = 0.0; ///< max(0, raw_rate)
  double v_a_used = 0.0; ///< modulation variance; NaN when undefined
  std::size_t optimizer_iterations = 0;
  bool at_boundary = false; ///< optimum sits on the edge of the V_A range
};

namespace detail {
inline void check(double eta, double v_a, double beta_rec) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("efficiency eta must lie in (0, 1]");
  if (!(v_a > 0.0) || !std::isfinite(v_a))
    throw DomainError("modulation variance V_A must be finite and > 0");
  if (!(beta_rec > 0.0 && beta_rec <= 1.0))
    throw DomainError("reconciliation efficiency must lie in (0, 1]");
}
} // namespace detail

/// Key rate for an explicit amplifier gain G >= 1.
///
/// The channel maps the TMSV of variance a = V_A + 1 to the standard form
/// (a, b, c) with b = eta G a + n, c^2 = eta G (a^2 - 1) and added noise
/// n = eta (G - 1) + 1 - eta. Every symplectic excess nu - 1 below is written
/// as a sum or product of non-negative terms, so near-pure states keep full
/// relative precision.
inline KeyRateResult key_rate_for_gain(double G, double eta, double v_a,
                                       double beta_rec = 1.0) {
  detail::check(eta, v_a, beta_rec);
  if (!(G >= 1.0))
    throw DomainError("amplifier gain must be >= 1");
  const double a = v_a + 1.0;
  const double gm1 = G - 1.0;
  const double n = eta * gm1 + (1.0 - eta);
  const double b = eta * G * a + n;
  // Bob's variance given Alice's heterodyne outcome.
  const double b_given_a = eta * G + n;

  // Joint spectrum: sqrt(det) = nu_+ nu_- = s, |b - a| = nu_+ - nu_-.
  const double s = a * n + eta * G;
  const double s_m1 = (a - 1.0) * (1.0 - eta) + eta * gm1 * (a + 1.0);
  const double d = std::abs(b - a);
  const double z = std::sqrt(d * d + 4.0 * s);
  const double m = std::min(2.0 * (1.0 - eta) * (a - 1.0), 2.0 * eta * gm1 * (a + 1.0));
  const double x_minus = 2.0 * s * m / ((2.0 * s - d + z) * (z + d));
  const double x_plus = 0.25 * (d + (d * d + 4.0 * s_m1) / (z + 2.0));

  // Alice's mode after Bob's x homodyne: variances (s / b, a).
  const double nc2_m1 = (a * a - 1.0) * n / b;
  const double x_cond = 0.5 * nc2_m1 / (std::sqrt(1.0 + nc2_m1) + 1.0);

  KeyRateResult r;
  r.v_a_used = v_a;
  r.i_ab = 0.5 * std::log2(b / b_given_a);
  const double s_ab = gaussian::entropy_g(x_plus) + gaussian::entropy_g(x_minus);
  r.chi_be = std::max(0.0, s_ab - gaussian::entropy_g(x_cond));
  r.raw_rate = beta_rec * r.i_ab - r.chi_be;
  r.key_rate = std::max(0.0, r.raw_rate);
  return r;
}

inline KeyRateResult key_rate(double kappa, double eta, double v_a,
                              double beta_rec = 1.0) {
  return key_rate_for_gain(channel::gain_from_kappa(kappa), eta, v_a, beta_rec);
}

struct ModulationRange {
  double lo = 1e-3;
  double hi = 1e3;
  std::size_t scan_points = 61;
  double rel_tol = 1e-4;
};

/// Maximises the unclamped rate over V_A: a log-spaced scan locates the best
/// bracket, golden-section search refines it. A non-positive optimum returns
/// key_rate = 0 with v_a_used = NaN.
inline KeyRateResult optimize_modulation_for_gain(double G, double eta,
                                                  double beta_rec = 1.0,
                                                  const ModulationRange &range = {}) {
  const double llo = std::log(range.lo);
  const double lhi = std::log(range.hi);
  const std::size_t n = std::max<std::size_t>(range.scan_points, 3);
  auto eval = [&](double lv) { return key_rate_for_gain(G, eta, std::exp(lv), beta_rec); };

  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lv = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double val = eval(lv).raw_rate;
    ++iterations;
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  const double step = (lhi - llo) / static_cast<double>(n - 1);
  double a = llo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = llo + step * static_cast<double>(std::min(best + 1, n - 1));

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c).raw_rate;
  double fd = eval(d).raw_rate;
  iterations += 2;
  // |delta ln V_A| < rel_tol is a relative tolerance on V_A.
  while (b - a > range.rel_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c).raw_rate;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d).raw_rate;
    }
    ++iterations;
  }
  double lv = 0.5 * (a + b);
  // The scan endpoints are candidates too (monotone landscapes).
  KeyRateResult r = eval(lv);
  for (double edge : {llo, lhi}) {
    const auto e = eval(edge);
    if (e.raw_rate > r.raw_rate) {
      r = e;
      lv = edge;
    }
  }
  r.optimizer_iterations = iterations + 3;
  r.at_boundary = std::abs(lv - llo) < range.rel_tol || std::abs(lv - lhi) < range.rel_tol;
  if (!(r.raw_rate > 0.0)) {
    r.key_rate = 0.0;
    r.v_a_used = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

inline KeyRateResult optimize_modulation(double kappa, double eta,
                                         double beta_rec = 1.0,
                                         const ModulationRange &range = {}) {
  return optimize_modulation_for_gain(channel::gain_from_kappa(kappa), eta,
                                      beta_rec, range);
}

struct Threshold {
  double kappa0 = 0.0;
  bool below_bracket = false; ///< key positive down to the lower search bound
  bool above_bracket = false; ///< no key anywhere in the search range
  std::size_t iterations = 0;
};

/// Smallest kappa with a positive optimised key rate, by bisection in ln kappa
/// to rel_tol relative.
inline Threshold threshold_kappa(double eta, double beta_rec = 1.0,
                                 double kappa_lo = 1e-6, double kappa_hi = 200.0,
                                 double rel_tol = 1e-6,
                                 const ModulationRange &range = {}) {
  auto positive = [&](double k) {
    return optimize_modulation(k, eta, beta_rec, range).raw_rate > 0.0;
  };
  Threshold t;
  if (positive(kappa_lo)) {
    t.kappa0 = kappa_lo;
    t.below_bracket = true;
    return t;
  }
  if (!positive(kappa_hi)) {
    t.kappa0 = kappa_hi;
    t.above_bracket = true;
    return t;
  }
  double lo = std::log(kappa_lo);
  double hi = std::log(kappa_hi);
  while (hi - lo > rel_tol) {
    const double mid = 0.5 * (lo + hi);
    (positive(std::exp(mid)) ? hi : lo) = mid;
    ++t.iterations;
  }
  t.kappa0 = std::exp(hi);
  return t;
}

} // namespace rqc::qkd
