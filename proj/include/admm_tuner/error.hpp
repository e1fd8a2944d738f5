#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace admm_tuner {

enum class ErrorCode {
  InvalidArgument,
  NonSymmetric,
  NoConvergence,
  SingularD,
  NotPositiveDefinite,
  RankDeficient,
  InvalidGraph,
  Disconnected,
  ResampleExhausted,
  NotArrowhead,
  BlockNotSpd,
  NonConvexPiece,
  NonConvexLocal,
  Stagnated,
  InfeasibleTopology,
  LengthMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failure class, `what()` carries the module-level detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace admm_tuner
