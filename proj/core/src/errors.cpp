#include "shetorque/errors.hpp"

namespace shetorque {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_frequency: return "invalid-frequency";
    case Errc::invalid_order: return "invalid-order";
    case Errc::invalid_input: return "invalid-input";
    case Errc::singular_slip: return "singular-slip";
    case Errc::undefined_ratio: return "undefined-ratio";
    case Errc::no_minimizing_ratio: return "no-minimizing-ratio";
    case Errc::invalid_pairing: return "invalid-pairing";
    case Errc::invalid_combination: return "invalid-combination";
    case Errc::unsupported_order: return "unsupported-order";
    case Errc::infeasible: return "infeasible";
    case Errc::no_solution: return "no-solution";
    case Errc::instability: return "instability";
    case Errc::leakage: return "leakage";
    case Errc::transient: return "transient";
    case Errc::unstable_region: return "unstable-region";
    case Errc::config: return "config";
    case Errc::empty_result: return "empty-result";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

InfeasibleError::InfeasibleError(const std::string& message, double max_mi)
    : Error(Errc::infeasible, message), max_mi_(max_mi) {}

}  // namespace shetorque
