#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace respole {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  BarrierOverlap,
  NonPositiveBarrier,
  NonZeroEndpoints,
  NonMonotoneKnots,
  UnsupportedBody,
  PoleAtEvaluationPoint,
  ContourThroughZero,
  OrderTooSmall,
  MeshMismatch,
  SolverFailure,
  IncomingVanishes,
  ResonantDenominator,
  Ambiguous,
  InsufficientData,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// front ends can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by bad input rather than by a computation.
  bool is_input_error() const noexcept;

 private:
  ErrorCode code_;
};

}  // namespace respole
