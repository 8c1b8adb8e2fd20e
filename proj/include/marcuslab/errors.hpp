#pragma once

#include <stdexcept>
#include <string>

namespace marcuslab {

/// Base for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MARCUSLAB_ERROR(Name)          \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

MARCUSLAB_ERROR(NonReturning);
MARCUSLAB_ERROR(ToleranceNotReached);
MARCUSLAB_ERROR(InsufficientReturns);
MARCUSLAB_ERROR(TooLarge);
MARCUSLAB_ERROR(DomainViolation);
MARCUSLAB_ERROR(NonFinite);
MARCUSLAB_ERROR(DegenerateObservable);
MARCUSLAB_ERROR(DegenerateSample);
MARCUSLAB_ERROR(ConfigError);
MARCUSLAB_ERROR(UnknownSuite);

#undef MARCUSLAB_ERROR

}  // namespace marcuslab
