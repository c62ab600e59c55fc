#pragma once

#include <stdexcept>
#include <string>

namespace foliate {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind { Config, Numerical, Geometric };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

#define FOLIATE_DEFINE_ERROR(Name, Kind)                                   \
    class Name : public Error {                                            \
      public:                                                              \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

FOLIATE_DEFINE_ERROR(InvalidPacket, Config)
FOLIATE_DEFINE_ERROR(BadGrid, Config)
FOLIATE_DEFINE_ERROR(ArityMismatch, Config)
FOLIATE_DEFINE_ERROR(InvalidSurface, Config)
FOLIATE_DEFINE_ERROR(ZeroNorm, Numerical)
FOLIATE_DEFINE_ERROR(StepUnderflow, Numerical)
FOLIATE_DEFINE_ERROR(DegenerateSegment, Numerical)
FOLIATE_DEFINE_ERROR(DegenerateIntersection, Geometric)
FOLIATE_DEFINE_ERROR(NoIntersection, Geometric)

#undef FOLIATE_DEFINE_ERROR

} // namespace foliate
