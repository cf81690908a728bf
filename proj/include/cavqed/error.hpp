#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cavqed {

enum class ErrorKind {
  domain,
  truncation,
  unsupported_regime,
  refinement_required,
  no_crossing,
  degenerate_everywhere,
  undefined_direction,
  wrong_propagator,
  stiffness,
  calibration,
  non_adiabatic,
  basis_mismatch,
  unknown_label,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by spectrum tracking when two continuation candidates are too close
/// to tell apart; carries a grid size that should resolve the ambiguity.
class RefinementError : public Error {
 public:
  RefinementError(const std::string& what, std::size_t suggested_points);
  std::size_t suggested_points() const noexcept { return suggested_points_; }

 private:
  std::size_t suggested_points_;
};

}  // namespace cavqed
