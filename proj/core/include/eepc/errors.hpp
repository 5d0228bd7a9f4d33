#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eepc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or input failed validation. `field` names the offending
/// entry (dotted path for nested documents).
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)), message_(message) {}

  const std::string& field() const noexcept { return field_; }
  /// The message without the field prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

/// Small-cell placement could not honour the minimum spacing within the
/// attempt budget.
class SpacingInfeasible : public Error {
 public:
  using Error::Error;
};

/// The recovered scale y0 collapsed to (numerically) zero.
class DegenerateScale : public Error {
 public:
  using Error::Error;
};

/// A barrier argument is non-positive at the evaluation point.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// The rate floor cannot be met under the given interference snapshot.
/// `cell` is the small-cell index when raised from inside a game, -1 otherwise.
class InfeasibleRate : public Error {
 public:
  explicit InfeasibleRate(const std::string& message, int cell = -1)
      : Error(message), cell_(cell) {}

  int cell() const noexcept { return cell_; }

 private:
  int cell_;
};

/// Penalty continuation ran out of outer rounds before reaching its
/// termination test. Carries the best power vector found.
class MaxItersExceeded : public Error {
 public:
  MaxItersExceeded(const std::string& message, std::vector<double> best_power)
      : Error(message), best_power_(std::move(best_power)) {}

  const std::vector<double>& best_power() const noexcept { return best_power_; }

 private:
  std::vector<double> best_power_;
};

}  // namespace eepc
