#pragma once

// Grid sweeps over (eta, a, k_so, T). Points are evaluated by a worker pool;
// each result lands in its own slot, so the table never depends on
// scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rqc/channel.hpp"
#include "rqc/config.hpp"
#include "rqc/error.hpp"
#include "rqc/overlap.hpp"
#include "rqc/qkd.hpp"
#include "rqc/wavepackets.hpp"

namespace rqc::sweep {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

enum class Status { ok, horizon, nonconvergence };

inline std::string_view to_string(Status s) {
  switch (s) {
  case Status::ok: return "ok";
  case Status::horizon: return "horizon";
  case Status::nonconvergence: return "nonconvergence";
  }
  return "ok";
}

struct NumericDiagnostics {
  double mean_ratio = nan;
  double variance_ratio = nan;
  double mean_error = nan;
  double variance_error = nan;
  double conjugate_weight = nan;
  double delta_residual = nan;
  std::size_t nodes = 0;
  bool log_grid = false;
  bool truncated = false;
};

struct Row {
  double T = nan;
  double k_so = nan;
  double a = nan;
  double kappa = nan;
  double G = nan;
  double V = nan;
  double eta = nan;
  double V_A = nan;
  double I_AB = nan;
  double chi_BE = nan;
  double K = nan;
  std::string engine;
  double discrepancy = nan;
  std::string validity;
  Status status = Status::ok;

  // Diagnostics only; not part of the table.
  std::string message;
  std::size_t optimizer_iterations = 0;
  bool at_boundary = false;
  NumericDiagnostics numeric;
};

struct Table {
  std::vector<Row> rows;

  [[nodiscard]] std::size_t count(Status s) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [s](const Row &r) { return r.status == s; }));
  }
};

/// Worker count from RQC_WORKERS; defaults to the hardware concurrency.
inline std::size_t workers_from_env() {
  if (const char *env = std::getenv("RQC_WORKERS"); env && *env) {
    const std::string text = env;
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(text, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != text.size() || value < 1 || value > 4096)
      throw ConfigError("RQC_WORKERS", "expected a positive integer, got '" + text + "'");
    return static_cast<std::size_t>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

inline qkd::KeyRateResult key_rate(const config::SweepConfig &c, double G,
                                   double eta) {
  if (c.v_a)
    return qkd::key_rate_for_gain(G, eta, *c.v_a, c.beta_rec);
  return qkd::optimize_modulation_for_gain(G, eta, c.beta_rec, c.modulation);
}

inline void fill_key(Row &r, const qkd::KeyRateResult &k) {
  r.V_A = k.v_a_used;
  r.I_AB = k.i_ab;
  r.chi_BE = k.chi_be;
  r.K = k.key_rate;
  r.optimizer_iterations = k.optimizer_iterations;
  r.at_boundary = k.at_boundary;
}

inline double rel(double x, double ref) { return std::abs(x / ref - 1.0); }

} // namespace detail

/// Evaluates one grid point. Horizon and non-convergence become row states.
inline Row evaluate_point(const config::SweepConfig &c, double T, double k_so,
                          double a, double eta) {
  Row r;
  r.T = T;
  r.k_so = k_so;
  r.a = a;
  r.eta = eta;
  r.engine = std::string(config::to_string(c.engine));

  std::optional<SourceProfile> src;
  if (c.has_profile()) {
    TransverseProfile tr{c.k_perp};
    src.emplace(k_so, *c.sigma_ratio * std::abs(k_so),
                kinematics::EmissionEvent{T, 0.0}, c.envelope, tr);
    r.validity = validity_report(*src, c.detector, T, c.thresholds).flags();
  } else {
    r.validity = T > 0.0 ? "profile:absent" : "horizon:violated";
  }

  if (!(T > 0.0)) {
    r.status = Status::horizon;
    r.message = HorizonError(T).what();
    return r;
  }

  const double kappa = channel::kappa(k_so, T);
  const double G = channel::gain_from_kappa(kappa);
  const auto params = channel::ChannelParams::from_kappa(kappa, eta);
  const double V = channel::quadrature_variance(params);

  if (c.engine != config::Engine::numeric) {
    r.kappa = kappa;
    r.G = G;
    r.V = V;
    detail::fill_key(r, detail::key_rate(c, G, eta));
  }
  if (c.engine == config::Engine::analytic)
    return r;

  overlap::OverlapResult num;
  try {
    num = overlap::evaluate(*src, c.detector, T, c.quadrature);
  } catch (const NonConvergence &e) {
    r.status = Status::nonconvergence;
    r.message = e.what();
    return r;
  }
  r.numeric = {num.mean_ratio,     num.variance_ratio, num.mean_error,
               num.variance_error, num.conjugate_weight, num.delta_residual,
               num.nodes,          num.log_grid,       num.truncated};
  // The amplifier model fixes V = 2G - 1 at unit efficiency.
  const double g_num = 0.5 * (num.variance_ratio + 1.0);
  const double v_num = eta * num.variance_ratio + 1.0 - eta;
  if (!(g_num >= 1.0)) {
    r.status = Status::nonconvergence;
    r.message = "numeric channel variance below vacuum";
    return r;
  }
  const auto key_num = detail::key_rate(c, g_num, eta);

  if (c.engine == config::Engine::numeric) {
    r.kappa = kappa;
    r.G = g_num;
    r.V = v_num;
    detail::fill_key(r, key_num);
    return r;
  }
  double d = std::max(detail::rel(num.mean_ratio, std::sqrt(G)),
                      detail::rel(v_num, V));
  if (r.K > 0.0)
    d = std::max(d, detail::rel(key_num.key_rate, r.K));
  r.discrepancy = d;
  return r;
}

/// Evaluates the full grid with `workers` threads. Row order is
/// lexicographic in (eta, a, k_so, T), T fastest.
inline Table run(const config::SweepConfig &c, std::size_t workers) {
  struct Index {
    double T, k_so, a, eta;
  };
  std::vector<Index> grid;
  grid.reserve(c.size());
  for (double eta : c.eta)
    for (double a : c.a)
      for (double k : c.k_so)
        for (double T : c.T)
          grid.push_back({T, k, a, eta});

  Table table;
  table.rows.resize(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < grid.size(); i = next++) {
        const auto &g = grid[i];
        table.rows[i] = evaluate_point(c, g.T, g.k_so, g.a, g.eta);
      }
    } catch (...) {
      const std::lock_guard lock(failure_lock);
      if (!failure)
        failure = std::current_exception();
      next = grid.size();
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(grid.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(work);
  }
  if (failure)
    std::rethrow_exception(failure);
  return table;
}

} // namespace rqc::sweep
