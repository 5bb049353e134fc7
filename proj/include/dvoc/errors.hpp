#pragma once

#include <stdexcept>
#include <string>

namespace dvoc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A value outside the mathematical domain of an operation (zero impedance, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed call arguments: mismatched sizes, empty series, bad indices.
class InputError : public Error {
public:
  using Error::Error;
};

/// Raised when a quantity requires a contracting certificate (c > 0) and none holds.
class NotContractingError : public Error {
public:
  using Error::Error;
};

/// The synchronized amplitude equation has no positive root.
class OscillatorDeathError : public Error {
public:
  explicit OscillatorDeathError(double radicand)
      : Error("oscillator death: amplitude radicand " + std::to_string(radicand) + " <= 0"),
        radicand_(radicand) {}

  double radicand() const noexcept { return radicand_; }

private:
  double radicand_;
};

/// A state component left the modeled regime during integration.
class DivergenceError : public Error {
public:
  DivergenceError(double t, std::size_t inverter, double norm)
      : Error("state diverged at t=" + std::to_string(t) + " s, inverter " +
              std::to_string(inverter + 1) + " (|x|=" + std::to_string(norm) + ")"),
        t_(t), inverter_(inverter), norm_(norm) {}

  double time() const noexcept { return t_; }
  /// Zero-based inverter index.
  std::size_t inverter() const noexcept { return inverter_; }
  double norm() const noexcept { return norm_; }

private:
  double t_;
  std::size_t inverter_;
  double norm_;
};

/// Scenario / config parse failures. `key()` names the offending field.
class ParseError : public Error {
public:
  ParseError(std::string key, const std::string& what)
      : Error("'" + key + "': " + what), key_(std::move(key)), reason_(what) {}

  const std::string& key() const noexcept { return key_; }
  /// The message without the key prefix.
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string key_;
  std::string reason_;
};

} // namespace dvoc
