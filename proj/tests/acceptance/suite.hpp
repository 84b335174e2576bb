#pragma once

// Acceptance suite: one pass/fail line per criterion. Shared by the
// acceptance binary and the `rqc selftest` verb.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rqc/bogoliubov.hpp"
#include "rqc/channel.hpp"
#include "rqc/config.hpp"
#include "rqc/gaussian.hpp"
#include "rqc/kinematics.hpp"
#include "rqc/output.hpp"
#include "rqc/overlap.hpp"
#include "rqc/qkd.hpp"
#include "rqc/sweep.hpp"
#include "rqc/wavepackets.hpp"

namespace rqc::acceptance {

using hp = boost::multiprecision::cpp_bin_float_50;

struct Outcome {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

inline std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                       static_cast<double>(i) /
                                       static_cast<double>(n - 1));
  return v;
}

// G = 1 / (1 - exp(-2 pi |k_so| T)) in 50 significant digits.
inline double gain_oracle(double k_so, double T) {
  const hp kappa = 2 * boost::math::constants::pi<hp>() *
                   abs(hp(k_so)) * hp(T);
  return static_cast<double>(1 / (1 - exp(-kappa)));
}

inline Outcome gain_formula() {
  double worst = 0.0;
  for (double k_so : {-1.0, -5.0, -20.0})
    for (double kappa : log_grid(1e-3, 50.0, 2001)) {
      const double T = kappa / (2.0 * std::numbers::pi * std::abs(k_so));
      worst = std::max(worst, std::abs(channel::effective_gain(k_so, T) -
                                       gain_oracle(k_so, T)));
    }
  const double g_ln2 = channel::gain_from_kappa(std::log(2.0));
  const bool pass = worst < 1e-12 && g_ln2 == 2.0;
  return {1, "gain formula", pass,
          fmt("max|G - G_50digit| = %.3e over kappa in [1e-3, 50]; G(ln 2) = %.17g",
              worst, g_ln2)};
}

inline Outcome amplifier_identity() {
  double worst = 0.0;
  for (double kappa : log_grid(1e-3, 50.0, 2001)) {
    const auto p = channel::ChannelParams::from_kappa(kappa);
    worst = std::max(worst, std::abs(channel::quadrature_variance(p) -
                                     (2.0 * channel::gain_from_kappa(kappa) - 1.0)));
  }
  return {2, "amplifier identity V = 2G - 1", worst < 1e-12,
          fmt("max|V - (2G - 1)| = %.3e", worst)};
}

struct SuitePoint {
  double k_so;
  double kappa;
};

inline std::vector<SuitePoint> suite_points() {
  std::vector<SuitePoint> pts;
  for (double k_so : {-5.0, -10.0, -20.0})
    for (double kappa : {0.5, 1.0, 2.0, 2.0 * std::numbers::pi})
      pts.push_back({k_so, kappa});
  return pts;
}

// The suite sets sigma / |k_so| = 0.05 and T from kappa; the detector keeps
// an infrared edge so the outer integral is finite.
inline constexpr double suite_sigma_ratio = 0.05;
inline constexpr double suite_k_min = 1e-2;

inline SourceProfile suite_source(const SuitePoint &p, double sigma_ratio) {
  const double T = p.kappa / (2.0 * std::numbers::pi * std::abs(p.k_so));
  return {p.k_so, sigma_ratio * std::abs(p.k_so), {T, 0.0}};
}

inline DetectorProfile suite_detector() {
  DetectorProfile d;
  d.k_min = suite_k_min;
  return d;
}

inline Outcome numeric_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  double worst_doubled = 0.0;
  double max_sigma_t = 0.0;
  bool trend = true;
  std::string failure;
  for (const auto &p : suite_points()) {
    const double G = channel::gain_from_kappa(p.kappa);
    auto err = [&](double ratio) {
      const auto src = suite_source(p, ratio);
      const double T = src.invariant();
      max_sigma_t = std::max(max_sigma_t, src.sigma() * T);
      const auto r = overlap::evaluate(src, suite_detector(), T);
      return std::max(std::abs(r.mean_ratio / std::sqrt(G) - 1.0),
                      std::abs(r.variance_ratio / (2.0 * G - 1.0) - 1.0));
    };
    try {
      const double e1 = err(suite_sigma_ratio);
      const double e2 = err(2.0 * suite_sigma_ratio);
      worst = std::max(worst, e1);
      worst_doubled = std::max(worst_doubled, e2);
      trend = trend && e2 <= e1;
    } catch (const std::exception &e) {
      failure = e.what();
      worst = worst_doubled = INFINITY;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool sigma_t_ok = max_sigma_t >= 10.0;
  const bool pass = sigma_t_ok && worst < 0.05 && worst_doubled <= 0.01 &&
                    trend && seconds < 300.0;
  std::string detail =
      fmt("max rel err %.3e (<0.05), doubled sigma*T %.3e (<=0.01), trend %s, "
          "largest sigma*T reachable %.3g (needs >= 10), %.1f s",
          worst, worst_doubled, trend ? "ok" : "not decreasing", max_sigma_t,
          seconds);
  if (!failure.empty())
    detail += "; " + failure;
  return {3, "numeric vs analytic channel", pass, detail};
}

inline Outcome plancherel() {
  std::size_t agree = 0;
  double worst_ratio = 0.0;
  const auto pts = suite_points();
  for (const auto &p : pts) {
    const auto src = suite_source(p, suite_sigma_ratio);
    const auto c = overlap::tau_window_crosscheck(src, suite_detector(),
                                                  src.invariant(), {1.0, 0.0}, 0.0);
    agree += c.agrees() ? 1 : 0;
    worst_ratio = std::max(worst_ratio, std::abs(c.mean_tau - c.mean_frequency) /
                                            c.combined_error());
  }
  return {4, "tau-domain vs frequency-domain mean", agree == pts.size(),
          fmt("%zu/%zu points agree; max |diff| / combined error = %.3f", agree,
              pts.size(), worst_ratio)};
}

inline Outcome kinematic_consistency() {
  double worst = 0.0;
  for (double a : {0.1, 0.5, 1.0, 2.0, 10.0})
    for (double T : log_grid(0.01, 100.0, 1001)) {
      const double v = std::tanh(a * kinematics::reception_proper_time(T, a));
      worst = std::max(worst, std::abs(kinematics::doppler_invariant(v, a) / T - 1.0));
    }
  double product = 0.0;
  for (double a : {0.5, 1.0, 2.0})
    for (double v = -0.95; v <= 0.951; v += 0.05) {
      const double p = kinematics::doppler_invariant(v, a) *
                       kinematics::doppler_invariant(-v, a) * a * a;
      product = std::max(product, std::abs(p - 1.0));
    }
  const double eps = std::numeric_limits<double>::epsilon();
  return {5, "kinematic consistency", worst < 1e-9 && product <= 4.0 * eps,
          fmt("round trip max rel %.3e; |T(v) T(-v) a^2 - 1| max %.3e (%.1f ulp)",
              worst, product, product / eps)};
}

inline Outcome bogoliubov_laws() {
  double ratio_err = 0.0;
  for (double k : log_grid(1e-3, 10.0, 1001)) {
    const auto A = bogoliubov::a_coefficient(k, -3.0, 0.1).value;
    const auto B = bogoliubov::b_coefficient(k, -3.0, 0.1).value;
    const double oracle =
        static_cast<double>(exp(2 * boost::math::constants::pi<hp>() * hp(k)));
    ratio_err = std::max(ratio_err, std::abs(std::norm(A) / std::norm(B) / oracle - 1.0));
  }
  double phase_err = 0.0;
  for (double k_so : {-5.0, -10.0, -20.0}) {
    const double sigma = suite_sigma_ratio * std::abs(k_so);
    for (double k_d : {0.1, 0.25, 0.4})
      for (double k_perp : {0.1, 0.5})
        for (int i = -400; i <= 400; ++i) {
          const double k_s = k_so + 4.0 * sigma * i / 400.0;
          const double d = bogoliubov::wrap_phase(
              bogoliubov::approx_phase(k_d, k_s, k_perp, k_so) -
              bogoliubov::exact_phase(k_d, k_s, k_perp));
          phase_err = std::max(phase_err, std::abs(d));
        }
  }
  return {6, "Bogolyubov ratio law and phase approximation",
          ratio_err < 1e-12 && phase_err < 1e-2,
          fmt("max rel |A|^2/|B|^2 vs e^{2 pi k} %.3e; max phase error %.3e rad "
              "(k_d <= 0.4, +-4 sigma)",
              ratio_err, phase_err)};
}

inline Outcome gaussian_engine() {
  double pure = 0.0;
  double spectrum = 0.0;
  for (double V : {1.0, 1.5, 2.0, 10.0, 1e2}) {
    const auto s = gaussian::tmsv(V);
    pure = std::max(pure, std::abs(gaussian::entropy(s)));
    for (double nu : gaussian::symplectic_eigenvalues(s))
      spectrum = std::max(spectrum, std::abs(nu - 1.0));
  }
  pure = std::max(pure, std::abs(gaussian::entropy(gaussian::CovarianceMatrix::vacuum(3))));
  double identity = 0.0;
  for (double va : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const auto k = qkd::key_rate_for_gain(1.0, 1.0, va);
    identity = std::max(identity, std::abs(k.key_rate - 0.5 * std::log2(1.0 + va)));
  }
  return {7, "Gaussian engine", pure < 1e-10 && spectrum < 1e-10 && identity < 1e-6,
          fmt("pure-state entropy %.3e; TMSV spectrum dev %.3e; identity-channel "
              "key rate dev %.3e",
              pure, spectrum, identity)};
}

inline Outcome qualitative_rates() {
  std::ostringstream why;
  bool pass = true;
  const auto kappas = log_grid(1e-3, 50.0, 121);

  bool monotone = true;
  for (double eta : {0.5, 0.8, 0.9, 1.0}) {
    double prev = -1.0;
    for (double kappa : kappas) {
      const double K = qkd::optimize_modulation(kappa, eta).key_rate;
      if (K < prev) {
        monotone = false;
        why << fmt("K decreases at eta=%g kappa=%.4g; ", eta, kappa);
        break;
      }
      prev = K;
    }
  }
  {
    double prev = -1.0;
    for (double kappa : log_grid(1e-3, 50.0, 1000)) {
      const double K = qkd::key_rate(kappa, 0.9, 10.0).key_rate;
      if (K < prev) {
        monotone = false;
        why << fmt("fixed V_A=10 K decreases at kappa=%.4g; ", kappa);
        break;
      }
      prev = K;
    }
  }
  pass = pass && monotone;

  bool thresholds = true;
  for (double eta : {0.5, 0.8, 0.9, 0.99}) {
    const auto t1 = qkd::threshold_kappa(eta, 1.0, 1e-6, 200.0);
    const auto t2 = qkd::threshold_kappa(eta, 1.0, 1e-4, 60.0);
    const double k0 = t1.kappa0;
    const bool finite = !t1.below_bracket && !t1.above_bracket;
    const bool stable = std::abs(t2.kappa0 / k0 - 1.0) <= 1e-6;
    const bool below_zero = qkd::optimize_modulation(k0 * (1.0 - 2e-6), eta).key_rate == 0.0 &&
                            qkd::optimize_modulation(0.5 * k0, eta).key_rate == 0.0;
    const bool above_pos = qkd::optimize_modulation(k0 * (1.0 + 2e-6), eta).key_rate > 0.0;
    const bool ok = finite && stable && below_zero && above_pos;
    thresholds = thresholds && ok;
    why << fmt("kappa0(eta=%g)=%.7g%s; ", eta, k0, ok ? "" : " [unstable]");
  }
  pass = pass && thresholds;

  const double flat = qkd::optimize_modulation_for_gain(1.0, 1.0).key_rate;
  std::size_t zero = 0;
  std::size_t not_reduced = 0;
  double largest_zero = 0.0;
  for (double kappa : kappas) {
    const double K = qkd::optimize_modulation(kappa, 1.0).key_rate;
    if (!(K > 0.0)) {
      ++zero;
      largest_zero = std::max(largest_zero, kappa);
    }
    if (!(K < flat))
      ++not_reduced;
  }
  const bool unit = zero == 0 && not_reduced == 0;
  pass = pass && unit;
  why << fmt("eta=1: K>0 at %zu/%zu kappa", kappas.size() - zero, kappas.size());
  if (zero > 0)
    why << fmt(" (K=0 up to kappa=%.4g, threshold %.7g)", largest_zero,
               qkd::threshold_kappa(1.0).kappa0);
  why << fmt(", below flat-space %.4f at %zu/%zu", flat,
             kappas.size() - not_reduced, kappas.size());
  if (!monotone)
    why << "; monotonicity violated";
  return {8, "qualitative key-rate surface", pass, why.str()};
}

inline config::SweepConfig determinism_config() {
  config::Entries e;
  config::apply_overrides(
      e, {"grid.T=-0.05:0.4:10", "grid.k_so=-5,-10", "grid.eta=0.8,1",
          "engine.mode=both", "source.sigma_ratio=0.05", "detector.k_min=0.01",
          "output.csv=", "output.surface=", "output.manifest="});
  return config::build(e);
}

inline Outcome determinism() {
  const auto cfg = determinism_config();
  const std::string reference = output::csv_string(sweep::run(cfg, 1));
  std::size_t identical = 0;
  const std::vector<std::size_t> counts = {1, 2, 3, 4, 8, 16};
  for (std::size_t w : counts)
    identical += output::csv_string(sweep::run(cfg, w)) == reference ? 1 : 0;
  return {9, "determinism across worker counts", identical == counts.size(),
          fmt("%zu/%zu runs byte-identical (%zu rows, %zu bytes)", identical,
              counts.size(), cfg.size(), reference.size())};
}

inline std::vector<std::function<Outcome()>> criteria() {
  return {gain_formula, amplifier_identity, numeric_oracle, plancherel,
          kinematic_consistency, bogoliubov_laws, gaussian_engine,
          qualitative_rates, determinism};
}

/// Runs every criterion, printing one line each. Returns the failure count.
inline int run(std::ostream &out) {
  int failures = 0;
  const auto all = criteria();
  for (std::size_t i = 0; i < all.size(); ++i) {
    Outcome o;
    try {
      o = all[i]();
    } catch (const std::exception &e) {
      o = {static_cast<int>(i + 1), "criterion raised", false, e.what()};
    }
    failures += o.pass ? 0 : 1;
    out << (o.pass ? "PASS" : "FAIL") << " [" << o.id << "] " << o.title << ": "
        << o.detail << std::endl;
  }
  out << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
      << std::endl;
  return failures;
}

} // namespace rqc::acceptance
