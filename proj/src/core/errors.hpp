#pragma once

#include <stdexcept>
#include <string>

namespace ellgrow {

#define ELLGROW_ERROR_TYPE(Name)                             \
  struct Name : std::runtime_error {                         \
    explicit Name(const std::string& what_arg)               \
        : std::runtime_error(#Name ": " + what_arg) {}       \
  }

ELLGROW_ERROR_TYPE(GeometryError);    // invalid domain data, inverse map failure
ELLGROW_ERROR_TYPE(QuadratureError);  // bad rule parameters, singularity misuse
ELLGROW_ERROR_TYPE(DomainError);      // evaluation point outside the domain
ELLGROW_ERROR_TYPE(SingularityError); // evaluation at the source point itself
ELLGROW_ERROR_TYPE(InputError);       // invalid field data or option values
ELLGROW_ERROR_TYPE(EpsilonRangeError);// eps outside the admissible range
ELLGROW_ERROR_TYPE(ShapeError);       // mismatched discretizations
ELLGROW_ERROR_TYPE(KernelError);      // kernel construction or series failure
ELLGROW_ERROR_TYPE(FitError);         // degenerate least-squares fit
ELLGROW_ERROR_TYPE(GrowthSignError);  // negative boundary velocity
ELLGROW_ERROR_TYPE(TopologyError);    // evolving curve self-intersects
ELLGROW_ERROR_TYPE(OracleError);      // finite-difference/Bessel helper misuse

#undef ELLGROW_ERROR_TYPE

}  // namespace ellgrow
