#pragma once

#include <stdexcept>
#include <string>

namespace shapeopt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonStrictlyConvex : Error { using Error::Error; };
struct NonPositiveGauge : Error { using Error::Error; };
struct NonConvexInput : Error { using Error::Error; };
struct DegenerateBody : Error { using Error::Error; };
struct DegeneratePolygon : Error { using Error::Error; };
struct NegativeArea : Error { using Error::Error; };
struct MeshFailure : Error { using Error::Error; };
struct SolverDivergence : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };
struct MaxIterationsError : Error { using Error::Error; };
struct AllInfeasible : Error { using Error::Error; };
struct ParameterOutOfRange : Error { using Error::Error; };
struct GapExceeded : Error { using Error::Error; };
struct GapInBoundary : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace shapeopt
