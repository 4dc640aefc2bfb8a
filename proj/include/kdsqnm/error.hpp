#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kdsqnm {

enum class ErrorCode {
  InvalidArgument,
  NotSubextremal,
  DegenerateRoot,
  NoConvergence,
  DegenerateJacobian,
  HorizonEvaluation,
  NegativeCurvature,
  OutsideAdmissible,
  OutOfRange,
  SingularJacobian,
  NearDegenerate,
  EmptyRegion,
  IllConditionedFit,
};

std::string_view to_string(ErrorCode code);

// Domain failure raised by every module. The message is the diagnostic the
// CLI echoes verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kdsqnm
