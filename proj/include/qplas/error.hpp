#pragma once

#include <stdexcept>
#include <string>

namespace qplas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// greens
class DomainError : public Error { using Error::Error; };
class SingularityError : public Error { using Error::Error; };
class GeometryError : public Error { using Error::Error; };

// lorentzian fits
class FitWindowError : public Error { using Error::Error; };
class FitError : public Error {
 public:
  FitError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// lowdin
class NumericError : public Error { using Error::Error; };
class DegenerateSetError : public Error { using Error::Error; };
class ConventionError : public Error { using Error::Error; };

// hamiltonian
class AssemblyError : public Error { using Error::Error; };
class EliminationError : public Error { using Error::Error; };

/// Step-size underflow or step budget exhaustion in the propagator.
class PropagationError : public Error {
 public:
  PropagationError(const std::string& what, double time, double step,
                   double max_abs_detuning, double suggested_frame_shift)
      : Error(what),
        time_(time),
        step_(step),
        max_abs_detuning_(max_abs_detuning),
        suggested_frame_shift_(suggested_frame_shift) {}
  double time() const { return time_; }
  double step() const { return step_; }
  double max_abs_detuning() const { return max_abs_detuning_; }
  double suggested_frame_shift() const { return suggested_frame_shift_; }

 private:
  double time_;
  double step_;
  double max_abs_detuning_;
  double suggested_frame_shift_;
};

/// Invalid configuration text. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace qplas
