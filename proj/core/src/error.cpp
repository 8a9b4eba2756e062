#include "vfts/error.hpp"

namespace vfts {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow:
      return "malformed_row";
    case ErrorCode::NonPositiveCurrent:
      return "non_positive_current";
    case ErrorCode::DuplicateVoltage:
      return "duplicate_voltage";
    case ErrorCode::NoSwitchPoint:
      return "no_switch_point";
    case ErrorCode::ZeroSwitchVoltage:
      return "zero_switch_voltage";
    case ErrorCode::ShortCurve:
      return "short_curve";
    case ErrorCode::DimensionTooSmall:
      return "dimension_too_small";
    case ErrorCode::ArgumentOutOfDomain:
      return "argument_out_of_domain";
    case ErrorCode::RankDeficientDesign:
      return "rank_deficient_design";
    case ErrorCode::TooFewCurves:
      return "too_few_curves";
    case ErrorCode::SingularGram:
      return "singular_gram";
    case ErrorCode::CycleMisalignment:
      return "cycle_misalignment";
    case ErrorCode::AllZeroVariance:
      return "all_zero_variance";
    case ErrorCode::QOutOfRange:
      return "q_out_of_range";
    case ErrorCode::InsufficientData:
      return "insufficient_data";
    case ErrorCode::CollinearRegressors:
      return "collinear_regressors";
    case ErrorCode::ShortHistory:
      return "short_history";
    case ErrorCode::LabelMismatch:
      return "label_mismatch";
    case ErrorCode::SameVariable:
      return "same_variable";
    case ErrorCode::OverlappingRoles:
      return "overlapping_roles";
    case ErrorCode::NonStationaryNoise:
      return "non_stationary_noise";
    case ErrorCode::SingularCovariance:
      return "singular_covariance";
    case ErrorCode::HoldoutTooLarge:
      return "holdout_too_large";
    case ErrorCode::GridMismatch:
      return "grid_mismatch";
    case ErrorCode::LagOutOfRange:
      return "lag_out_of_range";
    case ErrorCode::UnstableDynamics:
      return "unstable_dynamics";
    case ErrorCode::ConfigError:
      return "config_error";
    case ErrorCode::UnknownSubcommand:
      return "unknown_subcommand";
    case ErrorCode::IoError:
      return "io_error";
    case ErrorCode::InvalidArgument:
      return "invalid_argument";
  }
  return "unknown";
}

}  // namespace vfts
