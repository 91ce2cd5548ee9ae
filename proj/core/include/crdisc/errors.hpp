#pragma once

#include <stdexcept>
#include <string>

namespace crdisc {

// Base class for every domain error thrown by this library. Input and file
// format problems derive from InputError; the remaining types signal that a
// computation hit a mathematical obstruction (curve through the origin,
// divergent iteration, ...). The CLI maps InputError to exit code 1 and all
// other Error subtypes to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : Error {
  using Error::Error;
};

// --- circle ---
struct NonRealInput : InputError { using InputError::InputError; };
struct CurveThroughOrigin : Error { using Error::Error; };
struct UnresolvedWinding : Error { using Error::Error; };
struct NotAnalytic : Error { using Error::Error; };

// --- surface ---
struct NonRealProfile : Error { using Error::Error; };
struct HermitianViolation : InputError { using InputError::InputError; };
struct ParabolicInput : InputError { using InputError::InputError; };
struct ParameterOutOfRange : InputError { using InputError::InputError; };
struct RemainderOrderTooLow : InputError { using InputError::InputError; };
struct ParseError : InputError { using InputError::InputError; };

// --- maslov ---
struct DegenerateSingularity : Error { using Error::Error; };
struct NonSimpleZero : Error { using Error::Error; };
struct RootOnCircle : Error { using Error::Error; };
struct Unstable : Error { using Error::Error; };
struct Disagreement : Error { using Error::Error; };

// --- conformal ---
struct ProfileNotPositive : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NonUnivalent : Error { using Error::Error; };
struct RNotPositiveReal : Error { using Error::Error; };

// --- bishop ---
struct RoundTripFailure : Error { using Error::Error; };
struct IndexPositive : Error { using Error::Error; };

}  // namespace crdisc
