#pragma once

#include <stdexcept>
#include <string>

namespace qcurv {

// Numeric codes are shared with the C API (qc_status) and must stay in sync.
enum class ErrorCode : int {
  Dimension = 1,
  Domain = 2,
  Order = 3,
  Index = 4,
  Quadrature = 5,
  StructureViolation = 6,
  Integrability = 7,
  Limit = 8,
  Consistency = 9,
  NotPolyharmonic = 10,
  Resolution = 11,
  Precondition = 12,
  Decomposition = 13,
  Cutoff = 14,
  LevelSet = 15,
  Schema = 16,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define QCURV_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

QCURV_DEFINE_ERROR(DimensionError, Dimension)
QCURV_DEFINE_ERROR(DomainError, Domain)
QCURV_DEFINE_ERROR(OrderError, Order)
QCURV_DEFINE_ERROR(IndexError, Index)
QCURV_DEFINE_ERROR(QuadratureError, Quadrature)
QCURV_DEFINE_ERROR(StructureViolation, StructureViolation)
QCURV_DEFINE_ERROR(IntegrabilityError, Integrability)
QCURV_DEFINE_ERROR(LimitError, Limit)
QCURV_DEFINE_ERROR(ConsistencyError, Consistency)
QCURV_DEFINE_ERROR(NotPolyharmonic, NotPolyharmonic)
QCURV_DEFINE_ERROR(ResolutionError, Resolution)
QCURV_DEFINE_ERROR(PreconditionError, Precondition)
QCURV_DEFINE_ERROR(DecompositionError, Decomposition)
QCURV_DEFINE_ERROR(CutoffError, Cutoff)
QCURV_DEFINE_ERROR(LevelSetError, LevelSet)
QCURV_DEFINE_ERROR(SchemaError, Schema)

#undef QCURV_DEFINE_ERROR

}  // namespace qcurv
