#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vfts {

enum class ErrorCode {
  // ingest
  MalformedRow,
  NonPositiveCurrent,
  DuplicateVoltage,
  NoSwitchPoint,
  ZeroSwitchVoltage,
  ShortCurve,
  // basis
  DimensionTooSmall,
  ArgumentOutOfDomain,
  RankDeficientDesign,
  // screen
  TooFewCurves,
  // fpca
  SingularGram,
  CycleMisalignment,
  AllZeroVariance,
  QOutOfRange,
  // var / causality / diagnostics
  InsufficientData,
  CollinearRegressors,
  ShortHistory,
  LabelMismatch,
  SameVariable,
  OverlappingRoles,
  NonStationaryNoise,
  SingularCovariance,
  // forecast
  HoldoutTooLarge,
  GridMismatch,
  LagOutOfRange,
  // synth
  UnstableDynamics,
  // cli / io
  ConfigError,
  UnknownSubcommand,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's structured stderr output) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace vfts
