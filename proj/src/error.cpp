#include "psiest/error.hpp"

namespace psiest {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kDomainError: return "DomainError";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kInvalidParameter: return "InvalidParameter";
    case Errc::kMissingClosedForm: return "MissingClosedForm";
    case Errc::kSolverFailure: return "SolverFailure";
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kSignViolation: return "SignViolation";
    case Errc::kDegenerateDerivative: return "DegenerateDerivative";
    case Errc::kDegenerateProbes: return "DegenerateProbes";
    case Errc::kEmptyLowerSet: return "EmptyLowerSet";
    case Errc::kSyntaxError: return "SyntaxError";
    case Errc::kUnknownIdentifier: return "UnknownIdentifier";
    case Errc::kParseError: return "ParseError";
    case Errc::kEmptyData: return "EmptyData";
    case Errc::kNegativeWeight: return "NegativeWeight";
  }
  return "Error";
}

}  // namespace psiest
