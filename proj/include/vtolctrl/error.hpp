#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vtolctrl {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonFinite,
    SingularMatrix,
    NoConvergence,
    NotSymmetric,
    DegenerateSpectrum,
    NotStabilizable,
    SingularFeedthrough,
    UnstableSystem,
    SingularP,
    SingularX,
    RankDeficient,
    StepTooLarge,
    Diverged,
    EmptyTrace,
    SingularAIC,
    ParseError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; code() is the
// stable machine-readable part, what() carries context for humans.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace vtolctrl
