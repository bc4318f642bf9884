#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rectprop {

enum class ErrorCode {
  InvalidArgument,
  BoundaryPoint,
  NearSingularEnergy,
  BranchViolation,
  DegenerateStep,
  ThresholdEnergy,
  UnsupportedRegion,
  NoConvergence,
  ExtrapolationUnstable,
  SupportViolation,
  BoxTooSmall,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// drivers (sweeps, the CLI) can record it per row and keep going.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rectprop
