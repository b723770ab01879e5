#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lhsis {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point lies on (or within the guard radius of) a pole of a chart formula.
class SingularPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Adaptive quadrature could not meet its tolerance within the depth limit.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// The ODE integrator failed (step-size underflow or a singular state).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace lhsis
