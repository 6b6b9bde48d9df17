#pragma once

#include <stdexcept>
#include <string>

namespace peskin {

/// Failure categories surfaced to callers; the CLI maps each to an exit code.
enum class ErrorKind {
  config,
  geometry,
  tension_domain,
  step_rejected,
  insufficient_decay,
  ill_conditioned,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed or inconsistent configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Curve is too close to self-intersection for the boundary integral.
struct GeometryError : Error {
  explicit GeometryError(const std::string& what) : Error(ErrorKind::geometry, what) {}
};

/// A stretch left the validity interval of the tension law.
struct TensionDomainError : Error {
  explicit TensionDomainError(const std::string& what)
      : Error(ErrorKind::tension_domain, what) {}
};

/// Blow-up guard tripped during time stepping.
struct StepRejected : Error {
  explicit StepRejected(const std::string& what) : Error(ErrorKind::step_rejected, what) {}
};

struct InsufficientDecay : Error {
  explicit InsufficientDecay(const std::string& what)
      : Error(ErrorKind::insufficient_decay, what) {}
};

/// Eigenvector basis of a mode-pair matrix is numerically singular.
struct IllConditioned : Error {
  explicit IllConditioned(const std::string& what)
      : Error(ErrorKind::ill_conditioned, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace peskin
