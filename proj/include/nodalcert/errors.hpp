#ifndef NODALCERT_ERRORS_HPP
#define NODALCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nodalcert {

// Parameter constraint violated (n, ell, m, radii, tolerances).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input point or box lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative solver did not converge or hit a degenerate configuration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Root-finding was asked for a root that does not exist.
class NoRootError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A query point lies on the carrier of a cycle.
class GeometricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A simplicial complex violates face closure or orientability.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid too coarse for the requested geometry.
class ResolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Export format does not fit the mesh dimension.
class FormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A task ran without the upstream artifacts it needs.
class DependencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace nodalcert

#endif
