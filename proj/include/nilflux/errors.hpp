#ifndef NILFLUX_ERRORS_HPP
#define NILFLUX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nilflux {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define NILFLUX_ERROR(Name)                                                  \
    struct Name : Error {                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

NILFLUX_ERROR(ParseError);       // malformed rational / JSON value
NILFLUX_ERROR(BasisMismatch);    // mixing coordinate- and frame-basis forms
NILFLUX_ERROR(SingularMap);      // inverting a non-invertible affine map
NILFLUX_ERROR(DegenerateFrame);  // coframe matrix not invertible over the polynomial ring
NILFLUX_ERROR(NotAffine);        // field components not affine with rational coefficients
NILFLUX_ERROR(NotNilpotent);     // linear part fails the nilpotency requirement
NILFLUX_ERROR(NotInvariant);     // form is not invariant under the lattice
NILFLUX_ERROR(NotHomogeneous);   // top-wedge coefficient is not constant
NILFLUX_ERROR(NotClosed);        // exactness test on a non-closed form
NILFLUX_ERROR(BadDimension);     // region/form with the wrong number of coordinates
NILFLUX_ERROR(BadIsotopy);       // straight-line interpolation hits a singular map
NILFLUX_ERROR(DiagramViolation); // loop flux inconsistent with the evaluation diagram
NILFLUX_ERROR(DomainError);      // partial map applied outside its domain
NILFLUX_ERROR(ModelError);       // invalid manifold model data
NILFLUX_ERROR(PreconditionError);// documented operation precondition violated
NILFLUX_ERROR(UsageError);       // CLI/schema-level misuse

#undef NILFLUX_ERROR

} // namespace nilflux

#endif
