#pragma once

// Direct numerical evaluation of the homodyne observables seen by Rob.
//
// The longitudinal problem reduces to two inner transforms of the source
// envelope,
//   g_A(k) = (2 pi |k_so|)^{-1/2} Int dk_s conj(f_j(k_s)) e^{-i|k_s/k_so| k}
//   g_B(k) = (2 pi |k_so|)^{-1/2} Int dk_s      f_j(k_s)  e^{-i|k_s/k_so| k}
// (f_j carries the propagation phase of the emission event), and a positive
// outer integral over the Rindler frequency k of the detector. The detected
// mode is b = Int g_A(k) b_k dk; over the Minkowski vacuum
//   <b b^+> = N_A = Int |g_A|^2 / (1 - e^{-2 pi k}),
//   <b^+ b> = N_B = Int |g_A|^2 / (e^{2 pi k} - 1),
// and its commutator is N_A - N_B. The time-integrated photocurrent is
// evaluated in the frequency domain (Plancherel); tau_window_crosscheck
// evaluates the same quantity literally in Rob's proper time.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rqc/bogoliubov.hpp"
#include "rqc/error.hpp"
#include "rqc/quadrature.hpp"
#include "rqc/wavepackets.hpp"

namespace rqc::overlap {

using cplx = std::complex<double>;

struct Options {
  double inner_rel_tol = 1e-10;  ///< per inner transform, relative to sqrt(sigma)
  double outer_rel_tol = 1e-8;   ///< per outer integral, relative
  std::size_t min_nodes = 129;   ///< first outer level; (n - 1) % 4 == 0
  std::size_t max_nodes = (1u << 16) + 1;
  double log_grid_ratio = 20.0;  ///< use a logarithmic k grid above this k_hi/k_lo
  double infrared_cut = 1e-16;   ///< weight at k = 0 treated as vanishing
  double truncation_cut = 1e-12; ///< weight at k_max that flags truncation
  std::size_t max_fft = std::size_t{1} << 18;
};

/// Inner transform at one Rindler frequency, with its quadrature error.
using Transform = quad::Estimate<cplx>;

namespace detail {

// One inner transform. conjugate_source selects g_A (true) or g_B (false).
inline Transform inner_transform(const SourceProfile &src, double k_d1,
                                 bool conjugate_source, const Options &opt) {
  const double carrier = std::abs(src.k_so());
  const double half = src.support_halfwidth();
  const double T = src.invariant();
  const double prefactor = 1.0 / std::sqrt(2.0 * std::numbers::pi * carrier);
  // Phase per unit detuning; sets how many oscillations the integrand has.
  const double rate = conjugate_source ? (k_d1 / carrier - T)
                                       : (k_d1 / carrier + T);
  auto integrand = [&](double k_s1) {
    const cplx f = src.evaluate_longitudinal(k_s1);
    // |k_s1/k_so| k_d1 with |k_s1| = -k_s1 on the left-moving branch.
    const cplx kernel = std::polar(1.0, k_s1 * k_d1 / carrier);
    return (conjugate_source ? std::conj(f) : f) * kernel;
  };
  const auto pieces = static_cast<std::size_t>(std::clamp(
      std::ceil(2.0 * half * std::abs(rate) / std::numbers::pi), 4.0, 400.0));
  const double scale = std::sqrt(src.sigma());
  auto est = quad::integrate_adaptive(integrand, src.k_so() - half,
                                      src.k_so() + half,
                                      opt.inner_rel_tol * scale, 0.0, pieces);
  if (!est.converged)
    throw NonConvergence("inner transform did not converge at k = " +
                             std::to_string(k_d1),
                         est.error);
  est.value *= prefactor;
  est.error *= prefactor;
  return est;
}

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool truncated = false;
};

inline Band detection_band(const SourceProfile &src, const DetectorProfile &det,
                           double T, const Options &opt) {
  const double carrier = std::abs(src.k_so());
  const double centre = carrier * T;
  const double reach = carrier * src.transform_cutoff();
  Band b;
  const double natural_hi = centre + reach;
  b.hi = det.k_max > 0.0 ? std::min(det.k_max, natural_hi) : natural_hi;
  if (det.k_max > 0.0 && det.k_max < natural_hi) {
    const double r = src.transform_ratio(T - det.k_max / carrier);
    b.truncated = r * r > opt.truncation_cut;
  }
  const double natural_lo = centre - reach;
  if (natural_lo > det.k_min) {
    b.lo = natural_lo;
  } else if (det.k_min > 0.0) {
    b.lo = det.k_min;
  } else {
    const double r = src.transform_ratio(T);
    if (r * r > opt.infrared_cut)
      throw NonConvergence(
          "infrared divergence: detected weight at zero Rindler frequency is " +
              std::to_string(r * r) +
              " of its peak; give the detector a k_min > 0",
          r * r);
    b.lo = 1e-3 * centre;
  }
  if (!(b.hi > b.lo))
    throw DomainError("empty detection band: k_max <= k_min or below signal");
  return b;
}

// Maps s in [0, 1] onto [lo, hi]; logarithmic when the band spans decades so
// the 1/k growth of the thermal kernels near the infrared edge is flattened.
struct GridMap {
  double lo, hi;
  bool logarithmic;
  [[nodiscard]] double k(double s) const {
    return logarithmic ? lo * std::exp(s * std::log(hi / lo))
                       : lo + s * (hi - lo);
  }
  [[nodiscard]] double jacobian(double s) const {
    return logarithmic ? k(s) * std::log(hi / lo) : hi - lo;
  }
};

struct Sample {
  double k = 0.0;
  double jac = 0.0;
  cplx g_a;
  cplx g_b;
  double err = 0.0;
};

inline Sample sample_at(const SourceProfile &src, const GridMap &map, double s,
                        const Options &opt) {
  Sample out;
  out.k = map.k(s);
  out.jac = map.jacobian(s);
  const auto a = inner_transform(src, out.k, true, opt);
  const auto b = inner_transform(src, out.k, false, opt);
  out.g_a = a.value;
  out.g_b = b.value;
  out.err = std::max(a.error, b.error);
  return out;
}

} // namespace detail

/// g_A(k_d1) for an emission event with invariant T.
inline Transform inner_signal_transform(const SourceProfile &src, double T,
                                        double k_d1, const Options &opt = {}) {
  return detail::inner_transform(src.with_origin({T, 0.0}), k_d1, true, opt);
}

/// g_B(k_d1): the particle-creating path, peaked at k_d1 = -|k_so| T.
inline Transform inner_conjugate_transform(const SourceProfile &src, double T,
                                           double k_d1,
                                           const Options &opt = {}) {
  return detail::inner_transform(src.with_origin({T, 0.0}), k_d1, false, opt);
}

struct OverlapResult {
  double mean_ratio = 0.0;     ///< <X_B> / (2 Re(alpha e^{i phi})) for alpha = 1, phi = 0
  double variance_ratio = 0.0; ///< V / beta_bar^2
  double n_a = 0.0;
  double n_b = 0.0;
  double m_lo = 0.0;           ///< local-oscillator intensity seen by Rob
  double n_conj = 0.0;         ///< Int |c_B|^2, the particle-creating path
  double conjugate_weight = 0.0; ///< n_conj / n_a
  cplx cross_ab{};             ///< Int c_A conj(c_B)
  double n_a_error = 0.0;
  double n_b_error = 0.0;
  double m_lo_error = 0.0;
  double inner_error = 0.0;    ///< largest inner-transform error estimate
  double mean_error = 0.0;     ///< propagated error of mean_ratio
  double variance_error = 0.0;
  double k_lo = 0.0;
  double k_hi = 0.0;
  double k_mean = 0.0;         ///< centroid of |g_A|^2
  double k_std = 0.0;
  double delta_residual = 0.0; ///< k_std / k_mean; 0 in the delta-function limit
  std::size_t nodes = 0;
  bool log_grid = false;
  bool truncated = false;
  double T = 0.0;
  ValidityReport validity;

  [[nodiscard]] double commutator() const noexcept { return n_a - n_b; }

  /// Homodyne-normalized mean quadrature X / beta_bar for a coherent
  /// amplitude alpha measured at quadrature angle phi.
  [[nodiscard]] double mean_quadrature(cplx alpha, double phi) const {
    const cplx overlap = alpha * (n_a + cross_ab) +
                         std::conj(alpha) * (std::conj(cross_ab) + n_conj);
    return 2.0 * std::real(std::polar(1.0, phi) * overlap) /
           std::sqrt(m_lo * commutator());
  }
};

/// Full frequency-domain evaluation for the emission invariant T.
inline OverlapResult evaluate(const SourceProfile &source,
                              const DetectorProfile &det, double T,
                              const Options &opt = {}) {
  if (!(T > 0.0))
    throw HorizonError(T);
  det.check();
  const SourceProfile src = source.with_origin({T, 0.0});
  const auto band = detail::detection_band(src, det, T, opt);
  const detail::GridMap map{band.lo, band.hi,
                            band.hi / band.lo > opt.log_grid_ratio};

  std::vector<detail::Sample> samples;
  std::size_t n = opt.min_nodes;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    samples.push_back(detail::sample_at(
        src, map, static_cast<double>(i) / static_cast<double>(n - 1), opt));

  OverlapResult r;
  r.T = T;
  r.k_lo = band.lo;
  r.k_hi = band.hi;
  r.log_grid = map.logarithmic;
  r.truncated = band.truncated;
  r.validity = validity_report(src, det, T);

  for (;;) {
    const double h = 1.0 / static_cast<double>(n - 1);
    std::vector<double> fa(n), fb(n), fbb(n), fw(n), fk(n), fk2(n);
    std::vector<cplx> fab(n);
    std::vector<double> flo(n);
    double inner_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto &s = samples[i];
      const double wa = std::norm(s.g_a) * s.jac;
      const double plus = bogoliubov::kernel_plus(s.k);
      const double minus = bogoliubov::kernel_minus(s.k);
      const cplx c_a = s.g_a * std::sqrt(plus);
      const cplx c_b = s.g_b * std::sqrt(minus);
      fa[i] = wa * plus;
      fb[i] = wa * minus;
      fbb[i] = std::norm(c_b) * s.jac;
      fab[i] = c_a * std::conj(c_b) * s.jac;
      flo[i] = std::norm(c_a + c_b) * s.jac;
      fw[i] = wa;
      fk[i] = wa * s.k;
      fk2[i] = wa * s.k * s.k;
      inner_err = std::max(inner_err, s.err);
    }
    auto R = [h](const std::vector<double> &v) {
      return quad::simpson_richardson<double>(v, h);
    };
    const auto na = R(fa);
    const auto nb = R(fb);
    const auto lo = R(flo);
    const double tol = opt.outer_rel_tol * na.value;
    const bool done = na.error <= tol && nb.error <= tol && lo.error <= tol;
    if (done || 2 * n - 1 > opt.max_nodes) {
      if (!done)
        throw NonConvergence("outer Rindler-frequency integral did not reach "
                             "tolerance with " +
                                 std::to_string(n) + " nodes",
                             std::max({na.error, nb.error, lo.error}) /
                                 na.value);
      r.n_a = na.value;
      r.n_b = nb.value;
      r.m_lo = lo.value;
      r.n_a_error = na.error;
      r.n_b_error = nb.error;
      r.m_lo_error = lo.error;
      r.cross_ab = quad::simpson_richardson<cplx>(fab, h).value;
      r.n_conj = R(fbb).value;
      r.conjugate_weight = r.n_conj / r.n_a;
      const double w = R(fw).value;
      r.k_mean = R(fk).value / w;
      r.k_std = std::sqrt(std::max(0.0, R(fk2).value / w - r.k_mean * r.k_mean));
      r.delta_residual = r.k_std / r.k_mean;
      r.inner_error = inner_err;
      r.nodes = n;
      break;
    }
    // Refine: interleave new midpoints.
    std::vector<detail::Sample> next;
    next.reserve(2 * n - 1);
    const std::size_t m = 2 * n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      next.push_back(samples[i]);
      if (i + 1 < n)
        next.push_back(detail::sample_at(
            src, map, static_cast<double>(2 * i + 1) / static_cast<double>(m - 1),
            opt));
    }
    samples = std::move(next);
    n = m;
  }

  const double comm = r.commutator();
  if (!(comm > 1e-12 * r.n_a))
    throw NonConvergence("N_A - N_B vanished: unphysical discretization",
                         comm);
  r.mean_ratio = r.mean_quadrature({1.0, 0.0}, 0.0) / 2.0;
  r.variance_ratio = (r.n_a + r.n_b) / comm;
  const double rel_c = (r.n_a_error + r.n_b_error) / comm;
  r.mean_error = r.mean_ratio * (1.5 * r.m_lo_error / r.m_lo + 0.5 * rel_c);
  r.variance_error =
      r.variance_ratio * ((r.n_a_error + r.n_b_error) / (r.n_a + r.n_b) + rel_c);
  return r;
}

/// Mean quadrature X / beta_bar (zero for the vacuum, alpha = 0).
inline double homodyne_mean(const SourceProfile &src,
                            const DetectorProfile &det, double T, cplx alpha,
                            double phi, const Options &opt = {}) {
  return evaluate(src, det, T, opt).mean_quadrature(alpha, phi);
}

/// V / beta_bar^2 = (N_A + N_B) / (N_A - N_B).
inline double homodyne_variance(const SourceProfile &src,
                                const DetectorProfile &det, double T,
                                const Options &opt = {}) {
  return evaluate(src, det, T, opt).variance_ratio;
}

struct TauCrosscheck {
  double mean_tau = 0.0;       ///< X / beta_bar from the proper-time integral
  double mean_frequency = 0.0; ///< same from the Plancherel path
  double tau_window = 0.0;     ///< effective half-width used
  double window_error = 0.0;   ///< weight outside the window
  double quadrature_error = 0.0;
  double spectral_error = 0.0;
  double frequency_error = 0.0;
  bool window_truncated = false;

  [[nodiscard]] double tau_error() const noexcept {
    return window_error + quadrature_error + spectral_error;
  }
  [[nodiscard]] double combined_error() const noexcept {
    return tau_error() + frequency_error;
  }
  [[nodiscard]] bool agrees() const noexcept {
    return std::abs(mean_tau - mean_frequency) <= combined_error();
  }
};

/// Evaluates the time-integrated photocurrent directly over the proper-time
/// window [-tau_w, tau_w]. The detector amplitudes
///   F(tau) = (2 pi)^{-1/2} Int dk e^{-i k a tau} c(k)
/// are synthesised by FFT from a uniform spectral grid and |F|^2 is
/// integrated by composite Simpson over the window.
inline TauCrosscheck tau_window_crosscheck(const SourceProfile &source,
                                           const DetectorProfile &det,
                                           double T, cplx alpha, double phi,
                                           double a = 1.0,
                                           const Options &opt = {}) {
  if (!(a > 0.0))
    throw DomainError("acceleration must be > 0");
  const OverlapResult freq = evaluate(source, det, T, opt);
  const SourceProfile src = source.with_origin({T, 0.0});
  TauCrosscheck out;
  out.mean_frequency = freq.mean_quadrature(alpha, phi);
  out.frequency_error =
      std::abs(out.mean_frequency) * freq.mean_error / freq.mean_ratio;

  const double lo = freq.k_lo;
  const double hi = freq.k_hi;
  const double span = hi - lo;

  auto amplitudes = [&](double k) {
    const auto ga = detail::inner_transform(src, k, true, opt).value;
    const auto gb = detail::inner_transform(src, k, false, opt).value;
    const cplx c_a = ga * std::sqrt(bogoliubov::kernel_plus(k));
    const cplx c_b = gb * std::sqrt(bogoliubov::kernel_minus(k));
    return std::pair{alpha * c_a + std::conj(alpha) * c_b, c_a + c_b};
  };

  // Smallest spectral feature: the bump width, or the infrared edge when the
  // band is cut off there with appreciable weight.
  double feature = freq.k_std;
  {
    const auto edge = amplitudes(lo).second;
    const auto peak = amplitudes(std::clamp(freq.k_mean, lo, hi)).second;
    if (std::norm(edge) > 1e-6 * std::norm(peak))
      feature = std::min(feature, lo);
  }
  double tau_w = det.tau_window > 0.0
                     ? det.tau_window
                     : 20.0 / (a * std::min(1.0, feature));

  double dk = std::min({std::numbers::pi / (2.0 * a * tau_w), feature / 32.0,
                        span / 64.0});
  auto count = static_cast<std::size_t>(std::ceil(span / dk));
  count += count % 2; // even, so every other node spans the band too
  const std::size_t cap = opt.max_fft / 4;
  if (count + 1 > cap) {
    count = cap - 2;
    out.window_truncated = true;
  }
  dk = span / static_cast<double>(count);
  // Period of the synthesised F must hold the window twice over.
  tau_w = std::min(tau_w, std::numbers::pi / (2.0 * a * dk));

  // Uniform nodes lo + j dk, j = 0..count, trapezoid weights.
  std::vector<cplx> sig(count + 1), loc(count + 1);
  for (std::size_t j = 0; j <= count; ++j) {
    const auto [s, l] = amplitudes(lo + static_cast<double>(j) * dk);
    const double w = (j == 0 || j == count) ? 0.5 : 1.0;
    sig[j] = w * s;
    loc[j] = w * l;
  }

  std::size_t nfft = 1;
  while (nfft < 4 * (count + 1))
    nfft <<= 1;

  struct Pass {
    double mean = 0.0;
    double window_error = 0.0;
    double quad_error = 0.0;
    double tau_w = 0.0;
  };

  // stride 1: full spectral grid; stride 2: every other node at spacing 2 dk.
  auto run = [&](std::size_t stride) {
    const double step = dk * static_cast<double>(stride);
    const std::size_t m = count / stride;
    const std::size_t nf = nfft / stride;
    std::vector<cplx> in_s(nf, 0.0), in_l(nf, 0.0);
    for (std::size_t j = 0; j <= m; ++j) {
      const std::size_t src_idx = j * stride;
      in_s[j] = sig[src_idx];
      in_l[j] = loc[src_idx];
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> out_s, out_l;
    fft.fwd(out_s, in_s);
    fft.fwd(out_l, in_l);
    const double amp = step / std::sqrt(2.0 * std::numbers::pi);
    const double dtau =
        2.0 * std::numbers::pi / (a * step * static_cast<double>(nf));
    auto nw = static_cast<std::size_t>(std::floor(tau_w / dtau));
    nw = std::min(nw, nf / 2 - 2);
    nw -= nw % 2;
    if (nw < 2)
      throw NonConvergence("tau window narrower than the sampling step", dtau);
    const auto inw = static_cast<std::ptrdiff_t>(nw);
    const auto nfi = static_cast<std::ptrdiff_t>(nf);
    auto at = [&](std::ptrdiff_t idx) {
      const auto u = static_cast<std::size_t>(((idx % nfi) + nfi) % nfi);
      return std::pair{amp * out_s[u], amp * out_l[u]};
    };
    std::vector<cplx> cross(2 * nw + 1);
    std::vector<double> intensity(2 * nw + 1);
    for (std::ptrdiff_t i = -inw; i <= inw; ++i) {
      const auto [fs, fl] = at(i);
      cross[static_cast<std::size_t>(i + inw)] = a * fs * std::conj(fl);
      intensity[static_cast<std::size_t>(i + inw)] = a * std::norm(fl);
    }
    const auto sx = quad::simpson_richardson<cplx>(cross, dtau);
    const auto sl = quad::simpson_richardson<double>(intensity, dtau);
    // Weight of the synthesised period lying outside the window.
    double tail_l = 0.0;
    double tail_s = 0.0;
    for (std::ptrdiff_t i = inw + 1; i <= nfi / 2; ++i) {
      for (std::ptrdiff_t idx : {i, -i}) {
        if (idx == -nfi / 2)
          continue;
        const auto [fs, fl] = at(idx);
        tail_l += a * std::norm(fl) * dtau;
        tail_s += a * std::abs(fs * std::conj(fl)) * dtau;
      }
    }
    Pass p;
    p.tau_w = static_cast<double>(nw) * dtau;
    const double denom = std::sqrt(sl.value * freq.commutator());
    p.mean = 2.0 * std::real(std::polar(1.0, phi) * sx.value) / denom;
    const double mag = std::abs(p.mean);
    const double sx_abs = std::abs(sx.value);
    p.window_error = sx_abs > 0.0
                         ? mag * (tail_s / sx_abs + 0.5 * tail_l / sl.value)
                         : 2.0 * tail_s / denom;
    p.quad_error = sx_abs > 0.0
                       ? mag * (sx.error / sx_abs + 0.5 * sl.error / sl.value)
                       : 2.0 * sx.error / denom;
    return p;
  };

  const Pass fine = run(1);
  const Pass coarse = run(2);
  out.mean_tau = fine.mean;
  out.tau_window = fine.tau_w;
  out.window_error = fine.window_error;
  out.quadrature_error = fine.quad_error;
  out.spectral_error = std::abs(fine.mean - coarse.mean);
  out.window_truncated =
      out.window_truncated ||
      fine.window_error > 1e-6 * std::max(std::abs(fine.mean), 1e-300);
  return out;
}

} // namespace rqc::overlap
