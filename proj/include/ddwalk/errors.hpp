#pragma once

#include <stdexcept>
#include <string>

namespace ddwalk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction / validation errors
struct DuplicateEntry : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct OpinionOutOfRange : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };

// Oracle errors
struct BudgetExhausted : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct NonPositiveSigma : Error { using Error::Error; };

// Solver errors
struct NonTerminatingRisk : Error { using Error::Error; };
struct InvalidParameters : Error { using Error::Error; };

// Reference solver errors
struct TooLarge : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct SingularNonSymmetric : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };

// Hard-instance generation
struct ExpanderNotFound : Error { using Error::Error; };
struct GapViolation : Error { using Error::Error; };

// CLI / IO
struct ParseError : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct TooLargeForGroundTruth : Error { using Error::Error; };

}  // namespace ddwalk
