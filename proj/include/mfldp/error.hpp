#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfldp {

enum class ErrorCode {
  invalid_argument,
  normalization_diverged,
  space_mismatch,
  empty_configuration,
  arity_mismatch,
  budget_exhausted,
  too_few_particles,
  index_out_of_range,
  replica_length_mismatch,
  too_large_to_enumerate,
  no_finite_starting_point,
  diverged,
  non_differentiable_family,
  singular_configuration,
  singular_family,
  search_space_unsupported,
  requires_smooth_family,
  dimension_mismatch,
  support_too_large,
  event_empty,
  config_error,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mfldp
