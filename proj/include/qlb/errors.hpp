#pragma once

#include <stdexcept>
#include <string>

namespace qlb {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters fall outside the regime where a formula or theorem applies.
class RegimeError : public Error {
public:
    using Error::Error;
};

// Radii are misordered or exceed a profile's domain.
class GeometryError : public Error {
public:
    using Error::Error;
};

// The ODE integrator or quadrature failed to reach its tolerance.
class SolverError : public Error {
public:
    using Error::Error;
};

// A value (exponent, override, tolerance) is outside its admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace qlb
