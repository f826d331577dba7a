#pragma once

#include <stdexcept>
#include <string>

namespace dualflow {

/// Argument outside the domain of a function (e.g. a principal curvature <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid parameters when building a curvature function or grid.
class ConstructionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Abscissae handed to a resampler are not strictly increasing.
class ReparametrizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dual angles are not monotone: the primal is not strictly convex at grid resolution.
class DualityBroken : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A de Sitter graph stopped being spacelike (|Du*| >= 1).
class CausalityError : public std::runtime_error {
public:
    CausalityError(const std::string& what, int node) : std::runtime_error(what), node_(node) {}
    int node() const noexcept { return node_; }

private:
    int node_;
};

/// A principal curvature left the positive cone during stepping.
class ConvexityError : public std::runtime_error {
public:
    ConvexityError(const std::string& what, int node) : std::runtime_error(what), node_(node) {}
    int node() const noexcept { return node_; }

private:
    int node_;
};

/// The stable time step fell below the configured floor.
class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dualflow
