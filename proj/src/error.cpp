#include "cavqed/error.hpp"

namespace cavqed {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::unsupported_regime: return "unsupported-regime";
    case ErrorKind::refinement_required: return "refinement-required";
    case ErrorKind::no_crossing: return "no-crossing";
    case ErrorKind::degenerate_everywhere: return "degenerate-everywhere";
    case ErrorKind::undefined_direction: return "undefined-direction";
    case ErrorKind::wrong_propagator: return "wrong-propagator";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::calibration: return "calibration";
    case ErrorKind::non_adiabatic: return "non-adiabatic";
    case ErrorKind::basis_mismatch: return "basis-mismatch";
    case ErrorKind::unknown_label: return "unknown-label";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

RefinementError::RefinementError(const std::string& what, std::size_t suggested_points)
    : Error(ErrorKind::refinement_required, what), suggested_points_(suggested_points) {}

}  // namespace cavqed
