#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace thermo {

/// Input or configuration rejected (bad matrix, inadmissible word, failed audit).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration would exceed the configured item cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method failed to reach its stated tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyBranchSet : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Resource bounds shared by every enumerating operation.
struct Limits {
  std::uint64_t enumeration_cap = std::uint64_t{1} << 24;

  /// Reads THERMO_ENUM_CAP if set; falls back to the default cap.
  static Limits from_env();
};

/// Throws CapExceeded when `count` (possibly fractional, e.g. k^n as double)
/// is above the cap.
void require_within_cap(double count, const Limits& limits, const std::string& what);

}  // namespace thermo
