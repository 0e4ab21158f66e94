#pragma once

#include <stdexcept>
#include <string>

namespace varexp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exponent_field
struct AnyValueAtMostOne : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct MeshMismatch : Error { using Error::Error; };

// mesh
struct DegenerateBox : Error { using Error::Error; };

// modular_spaces
struct BracketFailure : Error { using Error::Error; };
struct NonzeroBoundary : Error { using Error::Error; };

// problem_model
struct BothZero : Error { using Error::Error; };

// solvers
struct NoMountainRidge : Error { using Error::Error; };
struct NoValley : Error { using Error::Error; };
struct MaxIter : Error { using Error::Error; };
struct DegenerateCollapse : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct OddnessRequired : Error { using Error::Error; };
struct LadderTooLarge : Error { using Error::Error; };

// cli / expr
struct ParseError : Error { using Error::Error; };

}  // namespace varexp
