#pragma once

#include <stdexcept>
#include <string>

namespace berglab {

// Bad user input: malformed files, invalid configuration, contract violations
// that a caller could have checked up front. CLI maps these to exit code 3.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures discovered at run time. CLI maps these to exit code 2
// when they amount to a failed acceptance check, 4 otherwise.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularPointError : NumericalError {
  explicit SingularPointError(const std::string& what) : NumericalError(what) {}
};

struct ChartError : NumericalError {
  explicit ChartError(const std::string& what) : NumericalError(what) {}
};

struct EmptyRealLocusError : NumericalError {
  explicit EmptyRealLocusError(const std::string& what) : NumericalError(what) {}
};

struct QuadratureError : NumericalError {
  explicit QuadratureError(const std::string& what) : NumericalError(what) {}
};

struct GuardViolation : NumericalError {
  explicit GuardViolation(const std::string& what) : NumericalError(what) {}
};

// Branch continuation failed to close around a loop (the lift to the ramified
// cover does not exist). Carries the measured root defect as a phase angle.
struct MonodromyObstruction : NumericalError {
  MonodromyObstruction(const std::string& what, double defect_angle)
      : NumericalError(what), defect_angle(defect_angle) {}
  double defect_angle;
};

}  // namespace berglab
