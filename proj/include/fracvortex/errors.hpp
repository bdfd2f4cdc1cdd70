#pragma once

#include <stdexcept>
#include <string>

namespace fracvortex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside (or on the boundary of) the domain it was evaluated on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a vortex position or at coincident vortices.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Phase integration could not route around a vortex.
class PathError : public Error {
 public:
  using Error::Error;
};

/// Inadmissible vortex configuration for the requested operation.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Non-finite values appeared during time stepping.
class BlowupError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path) : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace fracvortex
