#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A candidate metric left the Kahler cone: some node's smallest eigenvalue
/// dropped below the positivity threshold.
class NotPositiveDefinite : public Error {
public:
  NotPositiveDefinite(std::size_t node_, double min_eigenvalue_)
      : Error("metric not positive definite at node " + std::to_string(node_) +
              " (min eigenvalue " + std::to_string(min_eigenvalue_) + ")"),
        node(node_), min_eigenvalue(min_eigenvalue_) {}
  std::size_t node;
  double min_eigenvalue;
};

/// Newton damping could not pull the iterate back into the cone.
class ConeExit : public Error {
public:
  explicit ConeExit(const std::string& what_) : Error(what_) {}
};

/// Iteration budget exhausted before the residual target.
class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what_, double residual_, int iterations_)
      : Error(what_ + " (residual " + std::to_string(residual_) + " after " +
              std::to_string(iterations_) + " iterations)"),
        residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

/// Class-level consistency condition violated beyond tolerance
/// (incompatible background data, or a user lambda override that
/// disagrees with the computed value).
class CompatibilityFailure : public Error {
public:
  using Error::Error;
};

/// The averaged sign hypothesis on the synthetic curvature data fails,
/// so no compression factor exists.
class A1Violated : public Error {
public:
  using Error::Error;
};

/// NaN or Inf appeared in a field during a solve.
class NonFiniteField : public Error {
public:
  using Error::Error;
};

/// Dense oracle requested beyond its coarse-grid cap.
class GridTooLarge : public Error {
public:
  using Error::Error;
};

/// Config file rejected; carries the offending line number (0 = file level).
class ConfigError : public Error {
public:
  ConfigError(const std::string& what_, int line_)
      : Error("config line " + std::to_string(line_) + ": " + what_), line(line_) {}
  int line;
};

}  // namespace contlab
