// rqc: sweeps, single points, config validation and the acceptance suite.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rqc/config.hpp"
#include "rqc/error.hpp"
#include "rqc/output.hpp"
#include "rqc/sweep.hpp"
#include "suite.hpp"

namespace {

enum Exit : int {
  ok = 0,
  failure = 1,
  config_error = 2,
  nonconvergence = 3,
  io_error = 4,
};

int finish(const rqc::sweep::Table &table) {
  const auto bad = table.count(rqc::sweep::Status::nonconvergence);
  if (bad > 0) {
    std::cerr << "rqc: " << bad << " point(s) did not converge\n";
    return nonconvergence;
  }
  return ok;
}

int run_sweep(const std::string &path, const std::vector<std::string> &overrides,
              bool verbose) {
  const auto cfg = rqc::config::load(path, overrides);
  const auto table = rqc::sweep::run(cfg, rqc::sweep::workers_from_env());
  rqc::output::emit(table, cfg);
  if (verbose)
    rqc::output::emit_diagnostics(table, cfg, std::cerr);
  std::cerr << "rqc: " << table.rows.size() << " rows (ok "
            << table.count(rqc::sweep::Status::ok) << ", horizon "
            << table.count(rqc::sweep::Status::horizon) << ", nonconvergence "
            << table.count(rqc::sweep::Status::nonconvergence) << ")";
  if (!cfg.outputs.csv.empty())
    std::cerr << " -> " << cfg.outputs.csv;
  std::cerr << '\n';
  return finish(table);
}

int run_point(const std::vector<std::string> &assignments, bool verbose) {
  rqc::config::Entries e;
  rqc::config::apply_overrides(e, assignments);
  auto cfg = rqc::config::build(e);
  cfg.outputs = {};
  const auto table = rqc::sweep::run(cfg, rqc::sweep::workers_from_env());
  rqc::output::write_csv(std::cout, table);
  if (verbose)
    rqc::output::write_diagnostics(std::cerr, table);
  return finish(table);
}

int run_validate(const std::string &path, const std::vector<std::string> &overrides) {
  const auto cfg = rqc::config::load(path, overrides);
  std::cout << "valid: " << cfg.size() << " grid points (" << cfg.T.size() << " T x "
            << cfg.k_so.size() << " k_so x " << cfg.a.size() << " a x "
            << cfg.eta.size() << " eta), engine "
            << rqc::config::to_string(cfg.engine) << '\n';
  return ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Relativistic homodyne channel and CV-QKD key-rate calculator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "write JSON-lines diagnostics");

  std::string config_path;
  std::vector<std::string> overrides;

  auto *sweep = app.add_subcommand("sweep", "evaluate a configured grid");
  sweep->add_option("config", config_path, "configuration file")->required();
  sweep->add_option("overrides", overrides, "key=value overrides");

  std::vector<std::string> assignments;
  auto *point = app.add_subcommand("point", "evaluate one point, e.g. k_so=-10 T=0.1 eta=0.9");
  point->add_option("assignments", assignments, "key=value settings")->required();

  std::string validate_path;
  std::vector<std::string> validate_overrides;
  auto *validate = app.add_subcommand("validate", "check a configuration file");
  validate->add_option("config", validate_path, "configuration file")->required();
  validate->add_option("overrides", validate_overrides, "key=value overrides");

  auto *selftest = app.add_subcommand("selftest", "run the acceptance suite");

  for (auto *sub : {sweep, point, validate})
    sub->add_flag("-v,--verbose", verbose, "write JSON-lines diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (*sweep)
      return run_sweep(config_path, overrides, verbose);
    if (*point)
      return run_point(assignments, verbose);
    if (*validate)
      return run_validate(validate_path, validate_overrides);
    if (*selftest)
      return rqc::acceptance::run(std::cout) == 0 ? ok : failure;
  } catch (const rqc::ConfigError &e) {
    std::cerr << "rqc: config error: " << e.what() << '\n';
    return config_error;
  } catch (const rqc::DomainError &e) {
    std::cerr << "rqc: config error: " << e.what() << '\n';
    return config_error;
  } catch (const rqc::NonConvergence &e) {
    std::cerr << "rqc: non-convergence: " << e.what() << " (error estimate "
              << e.error_estimate() << ")\n";
    return nonconvergence;
  } catch (const rqc::IoError &e) {
    std::cerr << "rqc: I/O error: " << e.what() << '\n';
    return io_error;
  } catch (const std::exception &e) {
    std::cerr << "rqc: " << e.what() << '\n';
    return failure;
  }
  return ok;
}
