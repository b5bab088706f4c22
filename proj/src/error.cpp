#include "mcbern/error.hpp"

namespace mcbern {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NotSquare: return "NotSquare";
        case Errc::NegativeEntry: return "NegativeEntry";
        case Errc::RowSumViolation: return "RowSumViolation";
        case Errc::NonUniqueStationary: return "NonUniqueStationary";
        case Errc::DegenerateSupport: return "DegenerateSupport";
        case Errc::BoundTooSmall: return "BoundTooSmall";
        case Errc::EigensolverFailure: return "EigensolverFailure";
        case Errc::NoGap: return "NoGap";
        case Errc::SingularSolve: return "SingularSolve";
        case Errc::NotReversible: return "NotReversible";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::NonConcaveDetected: return "NonConcaveDetected";
        case Errc::OrderTooHigh: return "OrderTooHigh";
        case Errc::DomainError: return "DomainError";
        case Errc::NegativeLambdaPlus: return "NegativeLambdaPlus";
        case Errc::OutOfBound: return "OutOfBound";
        case Errc::TooLarge: return "TooLarge";
        case Errc::ParseError: return "ParseError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_numerical(Errc code) noexcept {
    switch (code) {
        case Errc::NoGap:
        case Errc::EigensolverFailure:
        case Errc::SingularSolve:
        case Errc::NonConcaveDetected:
            return true;
        default:
            return false;
    }
}

void raise(Errc code, const std::string& detail) {
    throw Error(code, std::string(to_string(code)) + ": " + detail);
}

}  // namespace mcbern
