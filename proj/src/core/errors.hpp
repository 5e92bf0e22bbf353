#pragma once

#include <stdexcept>
#include <string>

namespace wg {

// One entry per failure mode surfaced by the library. The numeric values are
// mirrored by the C API header; capi.cpp static_asserts they stay in sync.
#define WG_STATUS_LIST(X)                                                     \
  X(Ok, 0)                                                                    \
  X(GridTooSmall, 1)                                                          \
  X(GridMismatch, 2)                                                          \
  X(TooFewSamples, 3)                                                         \
  X(OutOfDomain, 4)                                                           \
  X(OrientationViolation, 5)                                                  \
  X(StrongRegularityViolation, 6)                                             \
  X(VanishingCurvature, 7)                                                    \
  X(BadInitialFrame, 8)                                                       \
  X(AdmissibilityFailure, 9)                                                  \
  X(DegenerateAlignment, 10)                                                  \
  X(PairDomainViolation, 11)                                                  \
  X(DomainViolation, 12)                                                      \
  X(NoConvergence, 13)                                                        \
  X(LineSearchFailure, 14)                                                    \
  X(CflViolation, 15)                                                         \
  X(BlowUp, 16)                                                               \
  X(ZeroGradient, 17)                                                         \
  X(NonMonotone, 18)                                                          \
  X(InvalidBasePoint, 19)                                                     \
  X(DegenerateCurve, 20)                                                      \
  X(SmoothnessViolation, 21)                                                  \
  X(CharacteristicDegenerate, 22)                                             \
  X(DegenerateImmersion, 23)                                                  \
  X(EmptyMesh, 24)                                                            \
  X(UnknownKey, 25)                                                           \
  X(TypeMismatch, 26)                                                         \
  X(MissingRequired, 27)                                                      \
  X(Io, 28)                                                                   \
  X(InvalidArgument, 29)                                                      \
  X(Internal, 30)

enum class Status {
#define WG_X(name, value) name = value,
  WG_STATUS_LIST(WG_X)
#undef WG_X
};

inline const char* status_name(Status s) {
  switch (s) {
#define WG_X(name, value)                                                     \
  case Status::name:                                                          \
    return #name;
    WG_STATUS_LIST(WG_X)
#undef WG_X
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Status code, const std::string& message)
      : std::runtime_error(std::string(status_name(code)) + ": " + message),
        code_(code) {}
  Status code() const { return code_; }

 private:
  Status code_;
};

[[noreturn]] inline void raise(Status code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace wg
