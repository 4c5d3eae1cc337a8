#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace srwz {

// Thrown when a parameter combination falls outside the feasible domain of a
// closed-form expression (e.g. the implied gamma of the binary S function).
class FeasibilityError : public std::runtime_error {
 public:
  FeasibilityError(const std::string& what, double offending_value)
      : std::runtime_error(what), offending_value_(offending_value) {}
  double offending_value() const { return offending_value_; }

 private:
  double offending_value_;
};

// Thrown when an iterative solver cannot certify its result.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by the region optimizer when no restart produced a point meeting the
// distortion constraints.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<double> best_distortions)
      : std::runtime_error(what), best_distortions_(std::move(best_distortions)) {}
  const std::vector<double>& best_distortions() const { return best_distortions_; }

 private:
  std::vector<double> best_distortions_;
};

}  // namespace srwz
