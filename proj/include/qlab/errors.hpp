#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

/// Precondition on a physical or numerical domain violated (grid too small,
/// query outside breakpoint range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration: scenario keys, mismatched grids.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability leaked to the periodic boundary beyond the tail threshold.
class BoundaryError : public std::runtime_error {
 public:
  BoundaryError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// File could not be created or written; what() names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qlab
