#pragma once

#include <stdexcept>
#include <string>

namespace sympidx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SYMPIDX_DEFINE_ERROR(Name)     \
  struct Name : ::sympidx::Error {     \
    using ::sympidx::Error::Error;     \
  }

SYMPIDX_DEFINE_ERROR(NonSymplectic);
SYMPIDX_DEFINE_ERROR(NotUnitary);
SYMPIDX_DEFINE_ERROR(NearDegenerate);
SYMPIDX_DEFINE_ERROR(SamplingTooCoarse);
SYMPIDX_DEFINE_ERROR(StepGuardViolated);
SYMPIDX_DEFINE_ERROR(DegenerateEndpoint);
SYMPIDX_DEFINE_ERROR(UnresolvedCrossing);
SYMPIDX_DEFINE_ERROR(DimMismatch);
SYMPIDX_DEFINE_ERROR(NotComparable);
SYMPIDX_DEFINE_ERROR(NoConvergence);
SYMPIDX_DEFINE_ERROR(StepTooLarge);
SYMPIDX_DEFINE_ERROR(SingularJacobian);
SYMPIDX_DEFINE_ERROR(NonPeriodicInput);
SYMPIDX_DEFINE_ERROR(DegenerateFit);
SYMPIDX_DEFINE_ERROR(InvalidParams);
SYMPIDX_DEFINE_ERROR(InconsistentChern);
SYMPIDX_DEFINE_ERROR(ParseError);

#undef SYMPIDX_DEFINE_ERROR

}  // namespace sympidx
