#pragma once

#include <stdexcept>
#include <string>

namespace rqc {

/// Input outside an operation's mathematical domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The emission event lies on or behind Rob's horizon (T <= 0), so the pulse
/// never reaches the right Rindler wedge.
class HorizonError : public DomainError {
public:
  explicit HorizonError(double T)
      : DomainError("beyond Rindler horizon: pulse never received (T = " +
                    std::to_string(T) + ")"),
        T_(T) {}
  [[nodiscard]] double invariant() const noexcept { return T_; }

private:
  double T_;
};

/// A quadrature or optimizer failed to reach its tolerance.
class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string &what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  [[nodiscard]] double error_estimate() const noexcept {
    return error_estimate_;
  }

private:
  double error_estimate_;
};

/// Bad sweep configuration; carries the offending key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string &what)
      : std::runtime_error(key.empty() ? what : key + ": " + what),
        key_(std::move(key)) {}
  [[nodiscard]] const std::string &key() const noexcept { return key_; }

private:
  std::string key_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace rqc
