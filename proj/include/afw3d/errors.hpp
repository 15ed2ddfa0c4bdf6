#pragma once

#include <stdexcept>
#include <string>

namespace afw3d {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define AFW3D_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// linalg
AFW3D_DEFINE_ERROR(SingularMatrix);
AFW3D_DEFINE_ERROR(RankDeficient);
AFW3D_DEFINE_ERROR(NoConvergence);
AFW3D_DEFINE_ERROR(FactorizationBreakdown);
// tensor_ops
AFW3D_DEFINE_ERROR(NotAntisymmetric);
AFW3D_DEFINE_ERROR(InvalidMaterial);
// mesh
AFW3D_DEFINE_ERROR(DegenerateTet);
AFW3D_DEFINE_ERROR(NonManifoldFace);
AFW3D_DEFINE_ERROR(MeshFormatError);
// polyspace / quadrature
AFW3D_DEFINE_ERROR(NonMonotoneOrder);
AFW3D_DEFINE_ERROR(DegreeTooHigh);
// interp
AFW3D_DEFINE_ERROR(SingularMomentSystem);
AFW3D_DEFINE_ERROR(DimensionMismatch);
AFW3D_DEFINE_ERROR(NoAdmissibleT);
AFW3D_DEFINE_ERROR(ConformityViolation);
// stability
AFW3D_DEFINE_ERROR(InfeasibleConstraints);
AFW3D_DEFINE_ERROR(EmptyKernel);
// cli
AFW3D_DEFINE_ERROR(ConfigError);

#undef AFW3D_DEFINE_ERROR

}  // namespace afw3d
