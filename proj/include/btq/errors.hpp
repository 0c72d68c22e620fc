#pragma once

#include <stdexcept>
#include <string>

namespace btq {

// Base class for every recoverable error raised by the library.  The CLI maps
// any Error escaping a study to exit code 1.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define BTQ_DEFINE_ERROR(Name)                                 \
  struct Name : Error {                                        \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

BTQ_DEFINE_ERROR(NonIntegralFlux);
BTQ_DEFINE_ERROR(ResolutionTooCoarse);
BTQ_DEFINE_ERROR(DimensionMismatch);
BTQ_DEFINE_ERROR(NoGapDetected);
BTQ_DEFINE_ERROR(NotConverged);
BTQ_DEFINE_ERROR(TooLarge);
BTQ_DEFINE_ERROR(RadiusTooLarge);
BTQ_DEFINE_ERROR(RankMismatch);
BTQ_DEFINE_ERROR(WeightOverflow);
BTQ_DEFINE_ERROR(InsufficientSamples);
BTQ_DEFINE_ERROR(DegenerateDiagonal);
BTQ_DEFINE_ERROR(QuadratureNotConverged);
BTQ_DEFINE_ERROR(TruncationInsufficient);
BTQ_DEFINE_ERROR(AmbiguousSign);
BTQ_DEFINE_ERROR(ParseError);
BTQ_DEFINE_ERROR(UnknownKey);
BTQ_DEFINE_ERROR(MissingDerivative);
BTQ_DEFINE_ERROR(AllZero);
BTQ_DEFINE_ERROR(Unsupported);

#undef BTQ_DEFINE_ERROR

}  // namespace btq
