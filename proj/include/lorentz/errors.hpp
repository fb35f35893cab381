#pragma once

#include <stdexcept>
#include <string>

namespace lorentz {

class Error : public std::runtime_error {
   public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define LORENTZ_ERROR(Name)                                                  \
    class Name : public Error {                                              \
       public:                                                               \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}   \
    }

// medium
LORENTZ_ERROR(NonPositiveCoefficient);
LORENTZ_ERROR(DuplicateOscillator);
LORENTZ_ERROR(EmptyMedium);
LORENTZ_ERROR(EvaluationAtPole);
LORENTZ_ERROR(AssumptionViolated);
LORENTZ_ERROR(UnresolvedClustering);

// dispersion
LORENTZ_ERROR(RootFindingFailure);
LORENTZ_ERROR(BranchCollision);
LORENTZ_ERROR(UnclassifiableBranch);
LORENTZ_ERROR(AsymptoticMismatch);
LORENTZ_ERROR(DegenerateLeadingCoefficient);

// operator
LORENTZ_ERROR(ZeroWaveVector);
LORENTZ_ERROR(DimensionMismatch);
LORENTZ_ERROR(NearSingularEvaluation);
LORENTZ_ERROR(NotDiagonalizable);
LORENTZ_ERROR(ContourTooTight);
LORENTZ_ERROR(QuadratureNonconvergent);

// evolution / energy
LORENTZ_ERROR(BandViolation);
LORENTZ_ERROR(NonPositiveRate);
LORENTZ_ERROR(WindowTooShort);
LORENTZ_ERROR(NonPolynomialDecay);
LORENTZ_ERROR(ExponentMismatch);

// cli
LORENTZ_ERROR(ConfigError);

#undef LORENTZ_ERROR

}  // namespace lorentz
