// Error taxonomy. Every failure mode that callers are expected to handle has
// its own type; all derive from Error so tests can catch broadly.
#pragma once

#include <stdexcept>
#include <string>

namespace thetaquant {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define THETAQUANT_ERROR(Name)                                   \
  struct Name : Error {                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

THETAQUANT_ERROR(NonSymmetricError);
THETAQUANT_ERROR(SingularMatrixError);
THETAQUANT_ERROR(RealPartNegativeError);
THETAQUANT_ERROR(PathCrossesZeroError);
THETAQUANT_ERROR(NotSymplecticError);
THETAQUANT_ERROR(ChartSingularError);
THETAQUANT_ERROR(NoSolutionError);
THETAQUANT_ERROR(InvalidParamsError);
THETAQUANT_ERROR(TruncationFailureError);
THETAQUANT_ERROR(GridTooCoarseError);
THETAQUANT_ERROR(GridMismatchError);
THETAQUANT_ERROR(WindowTooSmallError);
THETAQUANT_ERROR(SingularLError);
THETAQUANT_ERROR(DecompositionFailureError);
THETAQUANT_ERROR(SingularShiftError);
THETAQUANT_ERROR(DegeneratePairError);
THETAQUANT_ERROR(IllConditionedGramError);
THETAQUANT_ERROR(NotReducibleError);
THETAQUANT_ERROR(NoIntegerTransformFoundError);
THETAQUANT_ERROR(NotTransverseError);
THETAQUANT_ERROR(ConvergenceFailureError);
THETAQUANT_ERROR(ResolutionTooCoarseError);
THETAQUANT_ERROR(RadiusTooSmallError);
THETAQUANT_ERROR(UnknownSuiteError);
THETAQUANT_ERROR(ConfigInvalidError);

#undef THETAQUANT_ERROR

}  // namespace thetaquant
