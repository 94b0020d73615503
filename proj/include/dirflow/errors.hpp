#pragma once

#include <stdexcept>
#include <string>

namespace dirflow {

// Invalid user input: malformed laws, schedules, shapes or run configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-form bound or check was evaluated outside its hypotheses.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature ran out of panels before meeting its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Deep induced flow reached the origin, where the velocity is undefined.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirflow
