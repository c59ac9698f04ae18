#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace pinnfp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (dimensions, names, ranges).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A request the implementation deliberately does not support.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quantity is undefined for the given input (e.g. zero reference norm).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during evaluation.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::optional<std::size_t> epoch = std::nullopt,
                 std::optional<std::size_t> point = std::nullopt)
      : Error(decorate(what, epoch, point)), epoch_(epoch), point_(point) {}

  std::optional<std::size_t> epoch() const { return epoch_; }
  std::optional<std::size_t> point() const { return point_; }

 private:
  static std::string decorate(const std::string& what, std::optional<std::size_t> epoch,
                              std::optional<std::size_t> point) {
    std::string out = what;
    if (epoch) out += " (epoch " + std::to_string(*epoch) + ")";
    if (point) out += " (point " + std::to_string(*point) + ")";
    return out;
  }

  std::optional<std::size_t> epoch_;
  std::optional<std::size_t> point_;
};

/// Time stepper produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Direction construction received zero or collinear displacements.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pinnfp
