#pragma once

#include <stdexcept>
#include <string>

namespace pbc {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PBC_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

PBC_DEFINE_ERROR(InvalidArgument);
PBC_DEFINE_ERROR(QuadratureNonConvergence);
PBC_DEFINE_ERROR(DegenerateLayout);
PBC_DEFINE_ERROR(WeightCollapse);
PBC_DEFINE_ERROR(ParticleCrossing);
PBC_DEFINE_ERROR(SingularMass);
PBC_DEFINE_ERROR(BlowUp);
PBC_DEFINE_ERROR(BoundaryContamination);
PBC_DEFINE_ERROR(SingularSystem);
PBC_DEFINE_ERROR(GridMismatch);
PBC_DEFINE_ERROR(DegenerateFit);
PBC_DEFINE_ERROR(ConfigError);

#undef PBC_DEFINE_ERROR

}  // namespace pbc
