#pragma once

// Sweep outputs: the canonical CSV table, a gnuplot surface file, a JSON run
// manifest and optional JSON-lines diagnostics.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "rqc/config.hpp"
#include "rqc/error.hpp"
#include "rqc/sweep.hpp"

namespace rqc::output {

inline constexpr const char *version = "0.1.0";

inline constexpr const char *csv_header =
    "T,k_so,a,kappa,G,V,eta,V_A,I_AB,chi_BE,K,engine,discrepancy,validity,status";

/// %.17g, with a single spelling for NaN.
inline std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream &out, const sweep::Table &table) {
  out << csv_header << '\n';
  for (const auto &r : table.rows) {
    for (double v : {r.T, r.k_so, r.a, r.kappa, r.G, r.V, r.eta, r.V_A, r.I_AB,
                     r.chi_BE, r.K})
      out << format_double(v) << ',';
    out << r.engine << ',' << format_double(r.discrepancy) << ',' << r.validity
        << ',' << sweep::to_string(r.status) << '\n';
  }
}

inline std::string csv_string(const sweep::Table &table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

inline sweep::Table read_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header)
    throw IoError("CSV header mismatch");
  sweep::Table table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      f.push_back(cell);
    if (f.size() != 15)
      throw IoError("CSV line " + std::to_string(lineno) + ": expected 15 fields");
    auto num = [&](std::size_t i) {
      char *end = nullptr;
      const double v = std::strtod(f[i].c_str(), &end);
      if (end == f[i].c_str() || *end != '\0')
        throw IoError("CSV line " + std::to_string(lineno) + ": bad number '" +
                      f[i] + "'");
      return v;
    };
    sweep::Row r;
    r.T = num(0);
    r.k_so = num(1);
    r.a = num(2);
    r.kappa = num(3);
    r.G = num(4);
    r.V = num(5);
    r.eta = num(6);
    r.V_A = num(7);
    r.I_AB = num(8);
    r.chi_BE = num(9);
    r.K = num(10);
    r.engine = f[11];
    r.discrepancy = num(12);
    r.validity = f[13];
    if (f[14] == "ok")
      r.status = sweep::Status::ok;
    else if (f[14] == "horizon")
      r.status = sweep::Status::horizon;
    else if (f[14] == "nonconvergence")
      r.status = sweep::Status::nonconvergence;
    else
      throw IoError("CSV line " + std::to_string(lineno) + ": bad status");
    table.rows.push_back(std::move(r));
  }
  return table;
}

/// Whitespace-separated "T k_so K" blocks: one gnuplot index per (eta, a),
/// one scan line per k_so.
inline void write_surface(std::ostream &out, const sweep::Table &table,
                          const config::SweepConfig &c) {
  out << "# K(T, k_so); columns: T k_so K\n";
  const std::size_t nT = c.T.size();
  const std::size_t nk = c.k_so.size();
  std::size_t i = 0;
  for (double eta : c.eta) {
    for (double a : c.a) {
      if (i > 0)
        out << "\n\n";
      out << "# eta=" << format_double(eta) << " a=" << format_double(a) << '\n';
      for (std::size_t k = 0; k < nk; ++k) {
        if (k > 0)
          out << '\n';
        for (std::size_t t = 0; t < nT; ++t, ++i) {
          const auto &r = table.rows.at(i);
          out << format_double(r.T) << ' ' << format_double(r.k_so) << ' '
              << format_double(r.K) << '\n';
        }
      }
    }
  }
}

inline nlohmann::ordered_json manifest(const sweep::Table &table,
                                       const config::SweepConfig &c) {
  nlohmann::ordered_json m;
  m["tool"] = "rqc";
  m["version"] = version;
  nlohmann::ordered_json cfg;
  for (const auto &[k, v] : c.resolved)
    cfg[k] = v;
  m["config"] = cfg;
  m["grid"] = {{"T", c.T}, {"k_so", c.k_so}, {"a", c.a}, {"eta", c.eta}};
  m["order"] = {"eta", "a", "k_so", "T"};
  m["tolerances"] = {{"inner_rel", c.quadrature.inner_rel_tol},
                     {"outer_rel", c.quadrature.outer_rel_tol},
                     {"max_nodes", c.quadrature.max_nodes},
                     {"v_a_rel", c.modulation.rel_tol},
                     {"v_a_scan_points", c.modulation.scan_points}};
  m["rows"] = table.rows.size();
  m["status"] = {{"ok", table.count(sweep::Status::ok)},
                 {"horizon", table.count(sweep::Status::horizon)},
                 {"nonconvergence", table.count(sweep::Status::nonconvergence)}};
  m["versions"] = {
      {"rqc", version},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#ifdef __VERSION__
      {"compiler", __VERSION__},
#endif
      {"cxx", static_cast<long>(__cplusplus)}};
  m["csv_header"] = csv_header;
  return m;
}

inline nlohmann::ordered_json json_number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

/// One JSON object per row, in table order.
inline void write_diagnostics(std::ostream &out, const sweep::Table &table) {
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto &r = table.rows[i];
    nlohmann::ordered_json d;
    d["index"] = i;
    d["T"] = json_number(r.T);
    d["k_so"] = json_number(r.k_so);
    d["a"] = json_number(r.a);
    d["eta"] = json_number(r.eta);
    d["status"] = sweep::to_string(r.status);
    d["kappa"] = json_number(r.kappa);
    d["K"] = json_number(r.K);
    d["optimizer_iterations"] = r.optimizer_iterations;
    d["at_boundary"] = r.at_boundary;
    if (r.numeric.nodes > 0) {
      const auto &n = r.numeric;
      d["numeric"] = {{"mean_ratio", json_number(n.mean_ratio)},
                      {"variance_ratio", json_number(n.variance_ratio)},
                      {"mean_error", json_number(n.mean_error)},
                      {"variance_error", json_number(n.variance_error)},
                      {"conjugate_weight", json_number(n.conjugate_weight)},
                      {"delta_residual", json_number(n.delta_residual)},
                      {"nodes", n.nodes},
                      {"log_grid", n.log_grid},
                      {"truncated", n.truncated}};
    }
    if (!r.message.empty())
      d["message"] = r.message;
    out << d.dump() << '\n';
  }
}

namespace detail {
template <class Writer>
void write_file(const std::string &path, Writer &&w) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  w(out);
  out.flush();
  if (!out)
    throw IoError("write failed for '" + path + "'");
}
} // namespace detail

/// Writes every configured output; empty paths are skipped.
inline void emit(const sweep::Table &table, const config::SweepConfig &c) {
  if (!c.outputs.csv.empty())
    detail::write_file(c.outputs.csv, [&](std::ostream &o) { write_csv(o, table); });
  if (!c.outputs.surface.empty())
    detail::write_file(c.outputs.surface,
                       [&](std::ostream &o) { write_surface(o, table, c); });
  if (!c.outputs.manifest.empty())
    detail::write_file(c.outputs.manifest, [&](std::ostream &o) {
      o << manifest(table, c).dump(2) << '\n';
    });
}

inline void emit_diagnostics(const sweep::Table &table,
                             const config::SweepConfig &c, std::ostream &fallback) {
  if (c.outputs.diagnostics.empty()) {
    write_diagnostics(fallback, table);
    return;
  }
  detail::write_file(c.outputs.diagnostics,
                     [&](std::ostream &o) { write_diagnostics(o, table); });
}

} // namespace rqc::output
