#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cpforce {

/// Adaptive quadrature failed to reach the requested tolerance within its
/// evaluation budget. Carries the best estimate and the achieved error bound.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// A series (Matsubara sum or segment sequence) did not satisfy its
/// truncation criterion before the configured limit.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& operation, double partial_result,
                   double achieved_tol)
      : std::runtime_error(operation + ": truncation criterion not reached"),
        operation_(operation),
        partial_(partial_result),
        achieved_tol_(achieved_tol) {}
  const std::string& operation() const { return operation_; }
  double partial_result() const { return partial_; }
  double achieved_tolerance() const { return achieved_tol_; }

 private:
  std::string operation_;
  double partial_;
  double achieved_tol_;
};

/// Polarizability requested within the configured exclusion radius of a pole.
class PoleProximityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rate matrix violates the assumptions of the rate-equation model
/// (positive or non-real eigenvalue beyond tolerance, invalid populations).
class ModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The level graph splits into disconnected components, so the steady state
/// is not unique. Lists the components by level index.
class MultipleSteadyStatesError : public ModelError {
 public:
  explicit MultipleSteadyStatesError(std::vector<std::vector<int>> components)
      : ModelError(describe(components)), components_(std::move(components)) {}
  const std::vector<std::vector<int>>& components() const { return components_; }

 private:
  static std::string describe(const std::vector<std::vector<int>>& comps) {
    std::string s = "steady state not unique; disconnected level groups:";
    for (const auto& c : comps) {
      s += " {";
      for (std::size_t i = 0; i < c.size(); ++i)
        s += (i ? "," : "") + std::to_string(c[i]);
      s += "}";
    }
    return s;
  }
  std::vector<std::vector<int>> components_;
};

/// One-pass frequency-shift refinement produced shifts outside its validity
/// range (shift comparable to a transition frequency).
class IterationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario configuration problem; carries the offending field or line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field, int line = -1)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace cpforce
