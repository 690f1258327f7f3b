#include "mfldp/error.hpp"

namespace mfldp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::normalization_diverged: return "NormalizationDiverged";
    case ErrorCode::space_mismatch: return "SpaceMismatch";
    case ErrorCode::empty_configuration: return "EmptyConfiguration";
    case ErrorCode::arity_mismatch: return "ArityMismatch";
    case ErrorCode::budget_exhausted: return "BudgetExhausted";
    case ErrorCode::too_few_particles: return "TooFewParticles";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::replica_length_mismatch: return "ReplicaLengthMismatch";
    case ErrorCode::too_large_to_enumerate: return "TooLargeToEnumerate";
    case ErrorCode::no_finite_starting_point: return "NoFiniteStartingPoint";
    case ErrorCode::diverged: return "Diverged";
    case ErrorCode::non_differentiable_family: return "NonDifferentiableFamily";
    case ErrorCode::singular_configuration: return "SingularConfiguration";
    case ErrorCode::singular_family: return "SingularFamily";
    case ErrorCode::search_space_unsupported: return "SearchSpaceUnsupported";
    case ErrorCode::requires_smooth_family: return "RequiresSmoothFamily";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::support_too_large: return "SupportTooLarge";
    case ErrorCode::event_empty: return "EventEmpty";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace mfldp
