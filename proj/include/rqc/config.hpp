#pragma once

// Sweep configuration: a flat key = value file, optionally grouped under
// [section] headers (keys then read "section.key"), plus key=value overrides.
// Axis values are a single number, a comma list "a,b,c", a linear range
// "lo:hi:n" or a logarithmic range "lo:hi:n:log".

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rqc/error.hpp"
#include "rqc/overlap.hpp"
#include "rqc/qkd.hpp"
#include "rqc/wavepackets.hpp"

namespace rqc::config {

enum class Engine { analytic, numeric, both };

inline std::string_view to_string(Engine e) {
  switch (e) {
  case Engine::analytic: return "analytic";
  case Engine::numeric: return "numeric";
  case Engine::both: return "both";
  }
  return "analytic";
}

struct KeySpec {
  const char *key;
  const char *fallback; ///< nullptr: required
  const char *help;
};

inline const std::vector<KeySpec> &known_keys() {
  static const std::vector<KeySpec> keys = {
      {"grid.T", nullptr, "emission invariant x+t: value, list or range"},
      {"grid.k_so", nullptr, "source carrier wavenumber (< 0)"},
      {"grid.a", "1", "proper acceleration of the receiver"},
      {"grid.eta", "1", "receiver transmissivity in (0, 1]"},
      {"qkd.v_a", "optimize", "modulation variance or 'optimize'"},
      {"qkd.beta_rec", "1", "reconciliation efficiency in (0, 1]"},
      {"qkd.v_a_min", "1e-3", "lower end of the modulation search"},
      {"qkd.v_a_max", "1e3", "upper end of the modulation search"},
      {"engine.mode", "analytic", "analytic | numeric | both"},
      {"source.envelope", "gaussian", "gaussian | sech"},
      {"source.sigma_ratio", "", "sigma / |k_so|; required by the numeric engine"},
      {"source.k_perp", "0.1", "matched transverse wavenumber"},
      {"detector.k_min", "0", "infrared edge of the detection band"},
      {"detector.k_max", "0", "ultraviolet cutoff; 0 = automatic"},
      {"tolerance.inner_rel", "1e-10", "inner transform relative tolerance"},
      {"tolerance.outer_rel", "1e-8", "outer integral relative tolerance"},
      {"tolerance.max_nodes", "65537", "outer refinement limit"},
      {"validity.narrowband_max", "0.1", "largest sigma / |k_so|"},
      {"validity.delta_min", "5", "smallest sigma T"},
      {"validity.paraxial_max", "0.1", "largest k_perp / |k_so|"},
      {"validity.infrared_max", "1e-6", "largest detector weight at k_min"},
      {"output.csv", "sweep.csv", "result table"},
      {"output.surface", "sweep.dat", "gnuplot surface K(T, k_so)"},
      {"output.manifest", "sweep.json", "run manifest"},
      {"output.diagnostics", "", "JSON-lines diagnostics (verbose); empty = stderr"},
  };
  return keys;
}

/// Raw key -> value text, ordered by key.
using Entries = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && ws(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return std::string(s);
}

inline std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') &&
      v.back() == v.front())
    return v.substr(1, v.size() - 2);
  return v;
}

} // namespace detail

/// Resolves a possibly bare key ("eta") to its canonical "section.key".
inline std::string canonical_key(const std::string &key) {
  const auto &keys = known_keys();
  for (const auto &k : keys)
    if (key == k.key)
      return key;
  if (key.find('.') == std::string::npos) {
    std::string found;
    for (const auto &k : keys) {
      const std::string_view full = k.key;
      const auto dot = full.find('.');
      if (full.substr(dot + 1) == key) {
        if (!found.empty())
          throw ConfigError(key, "ambiguous key; qualify it with a section");
        found = k.key;
      }
    }
    if (key == "engine")
      found = "engine.mode";
    if (!found.empty())
      return found;
  }
  throw ConfigError(key, "unknown key");
}

inline void set_entry(Entries &entries, const std::string &key,
                      const std::string &value) {
  entries[canonical_key(key)] = value;
}

inline Entries parse_text(std::istream &in, const std::string &origin = "config") {
  Entries entries;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty())
      continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(where, "unterminated section header");
      section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where, "expected key = value");
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value =
        detail::unquote(detail::trim(std::string_view(t).substr(eq + 1)));
    if (key.empty())
      throw ConfigError(where, "empty key");
    if (!section.empty())
      key = section + "." + key;
    set_entry(entries, key, value);
  }
  return entries;
}

inline Entries load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config file '" + path + "'");
  return parse_text(in, path);
}

/// Applies "key=value" overrides in order.
inline void apply_overrides(Entries &entries,
                            const std::vector<std::string> &overrides) {
  for (const auto &o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(o, "override must read key=value");
    set_entry(entries, detail::trim(std::string_view(o).substr(0, eq)),
              detail::unquote(detail::trim(std::string_view(o).substr(eq + 1))));
  }
}

inline double parse_number(const std::string &key, const std::string &text) {
  const std::string t = detail::trim(text);
  double v = 0.0;
  const auto *first = t.data();
  const auto *last = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  return v;
}

/// Expands an axis string into its grid values.
inline std::vector<double> parse_axis(const std::string &key,
                                      const std::string &text) {
  const std::string t = detail::trim(text);
  if (t.empty())
    throw ConfigError(key, "empty axis");
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ':'))
      parts.push_back(detail::trim(part));
    if (parts.size() != 3 && parts.size() != 4)
      throw ConfigError(key, "range must read lo:hi:n or lo:hi:n:log");
    const double lo = parse_number(key, parts[0]);
    const double hi = parse_number(key, parts[1]);
    const double nd = parse_number(key, parts[2]);
    if (nd < 1.0 || nd != std::floor(nd) || nd > 1e7)
      throw ConfigError(key, "range count must be a positive integer");
    const auto n = static_cast<std::size_t>(nd);
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log")
      throw ConfigError(key, "unknown range spacing '" + parts[3] + "'");
    if (log && !(lo * hi > 0.0))
      throw ConfigError(key, "log range needs endpoints of one sign, non-zero");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      if (log) {
        const double s = lo < 0.0 ? -1.0 : 1.0;
        const double l0 = std::log(std::abs(lo));
        const double l1 = std::log(std::abs(hi));
        out[i] = s * std::exp(l0 + (l1 - l0) * f);
      } else {
        out[i] = lo + (hi - lo) * f;
      }
    }
    if (n > 1) {
      out.front() = lo;
      out.back() = hi;
    }
    return out;
  }
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number(key, item));
  return out;
}

struct Outputs {
  std::string csv;
  std::string surface;
  std::string manifest;
  std::string diagnostics;
};

struct SweepConfig {
  std::vector<double> T;
  std::vector<double> k_so;
  std::vector<double> a;
  std::vector<double> eta;
  std::optional<double> v_a; ///< empty: optimise per point
  double beta_rec = 1.0;
  qkd::ModulationRange modulation{};
  Engine engine = Engine::analytic;
  Envelope envelope = Envelope::gaussian;
  std::optional<double> sigma_ratio;
  double k_perp = 0.1;
  DetectorProfile detector{};
  overlap::Options quadrature{};
  ValidityThresholds thresholds{};
  Outputs outputs{};
  Entries resolved; ///< every key, defaults filled in

  [[nodiscard]] std::size_t size() const noexcept {
    return T.size() * k_so.size() * a.size() * eta.size();
  }
  [[nodiscard]] bool has_profile() const noexcept { return sigma_ratio.has_value(); }
};

/// Validates the entries and builds the typed configuration.
inline SweepConfig build(const Entries &given) {
  Entries e;
  for (const auto &k : known_keys()) {
    const auto it = given.find(k.key);
    if (it != given.end())
      e[k.key] = it->second;
    else if (k.fallback == nullptr)
      throw ConfigError(k.key, "required key missing");
    else
      e[k.key] = k.fallback;
  }
  for (const auto &[k, v] : given)
    if (!e.count(k))
      throw ConfigError(k, "unknown key");

  SweepConfig c;
  c.resolved = e;
  auto num = [&](const char *key) { return parse_number(key, e.at(key)); };

  c.T = parse_axis("grid.T", e.at("grid.T"));
  c.k_so = parse_axis("grid.k_so", e.at("grid.k_so"));
  c.a = parse_axis("grid.a", e.at("grid.a"));
  c.eta = parse_axis("grid.eta", e.at("grid.eta"));
  for (double k : c.k_so)
    if (!(k < 0.0))
      throw ConfigError("grid.k_so", "carrier must be < 0 (left-moving pulses)");
  for (double a : c.a)
    if (!(a > 0.0))
      throw ConfigError("grid.a", "acceleration must be > 0");
  for (double eta : c.eta)
    if (!(eta > 0.0 && eta <= 1.0))
      throw ConfigError("grid.eta", "transmissivity must lie in (0, 1]");

  const std::string va = detail::trim(e.at("qkd.v_a"));
  if (va != "optimize") {
    c.v_a = parse_number("qkd.v_a", va);
    if (!(*c.v_a > 0.0))
      throw ConfigError("qkd.v_a", "modulation variance must be > 0");
  }
  c.beta_rec = num("qkd.beta_rec");
  if (!(c.beta_rec > 0.0 && c.beta_rec <= 1.0))
    throw ConfigError("qkd.beta_rec", "must lie in (0, 1]");
  c.modulation.lo = num("qkd.v_a_min");
  c.modulation.hi = num("qkd.v_a_max");
  if (!(c.modulation.lo > 0.0 && c.modulation.hi > c.modulation.lo))
    throw ConfigError("qkd.v_a_max", "need 0 < v_a_min < v_a_max");

  const std::string mode = detail::trim(e.at("engine.mode"));
  if (mode == "analytic")
    c.engine = Engine::analytic;
  else if (mode == "numeric")
    c.engine = Engine::numeric;
  else if (mode == "both")
    c.engine = Engine::both;
  else
    throw ConfigError("engine.mode", "expected analytic, numeric or both");

  try {
    c.envelope = envelope_from_string(detail::trim(e.at("source.envelope")));
  } catch (const DomainError &err) {
    throw ConfigError("source.envelope", err.what());
  }
  if (!detail::trim(e.at("source.sigma_ratio")).empty()) {
    c.sigma_ratio = num("source.sigma_ratio");
    if (!(*c.sigma_ratio > 0.0))
      throw ConfigError("source.sigma_ratio", "must be > 0");
  }
  if (c.engine != Engine::analytic && !c.sigma_ratio)
    throw ConfigError("source.sigma_ratio",
                      "numeric engine requires the source profile");
  c.k_perp = num("source.k_perp");
  if (!(c.k_perp > 0.0))
    throw ConfigError("source.k_perp", "must be > 0");

  c.detector.k_min = num("detector.k_min");
  c.detector.k_max = num("detector.k_max");
  c.detector.transverse.k_perp = c.k_perp;
  try {
    c.detector.check();
  } catch (const DomainError &err) {
    throw ConfigError("detector.k_max", err.what());
  }

  c.quadrature.inner_rel_tol = num("tolerance.inner_rel");
  c.quadrature.outer_rel_tol = num("tolerance.outer_rel");
  if (!(c.quadrature.inner_rel_tol > 0.0) || !(c.quadrature.outer_rel_tol > 0.0))
    throw ConfigError("tolerance.outer_rel", "tolerances must be > 0");
  const double max_nodes = num("tolerance.max_nodes");
  if (max_nodes < 129.0 || max_nodes > 1e8)
    throw ConfigError("tolerance.max_nodes", "must lie in [129, 1e8]");
  c.quadrature.max_nodes = static_cast<std::size_t>(max_nodes);

  c.thresholds.narrowband_max = num("validity.narrowband_max");
  c.thresholds.delta_min = num("validity.delta_min");
  c.thresholds.paraxial_max = num("validity.paraxial_max");
  c.thresholds.infrared_max = num("validity.infrared_max");

  c.outputs = {detail::trim(e.at("output.csv")), detail::trim(e.at("output.surface")),
               detail::trim(e.at("output.manifest")),
               detail::trim(e.at("output.diagnostics"))};
  return c;
}

inline SweepConfig load(const std::string &path,
                        const std::vector<std::string> &overrides = {}) {
  Entries e = load_file(path);
  apply_overrides(e, overrides);
  return build(e);
}

} // namespace rqc::config
