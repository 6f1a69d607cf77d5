#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shetorque {

enum class Errc {
  invalid_frequency,
  invalid_order,
  invalid_input,
  singular_slip,
  undefined_ratio,
  no_minimizing_ratio,
  invalid_pairing,
  invalid_combination,
  unsupported_order,
  infeasible,
  no_solution,
  instability,
  leakage,
  transient,
  unstable_region,
  config,
  empty_result,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map them without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by the angle solvers when a (modulation index, ratio) target has no
/// root in the feasible triangle. Carries the supremum of the modulation
/// index reachable under the same constraint, or a negative value when that
/// could not be evaluated.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double max_mi);

  [[nodiscard]] double max_mi() const noexcept { return max_mi_; }

 private:
  double max_mi_;
};

}  // namespace shetorque
