#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcbern {

/// Failure categories raised by the library. Every throwing entry point
/// reports one of these through mcbern::Error.
enum class Errc {
    NotSquare,
    NegativeEntry,
    RowSumViolation,
    NonUniqueStationary,
    DegenerateSupport,
    BoundTooSmall,
    EigensolverFailure,
    NoGap,
    SingularSolve,
    NotReversible,
    OutOfRange,
    ZeroVariance,
    NonConcaveDetected,
    OrderTooHigh,
    DomainError,
    NegativeLambdaPlus,
    OutOfBound,
    TooLarge,
    ParseError,
    InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

/// True for the categories that signal a numerical failure (as opposed to
/// bad input): the CLI maps these to exit code 2.
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& detail);

}  // namespace mcbern
