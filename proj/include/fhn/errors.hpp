#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

/// Input outside the region where an operation is defined (s = 0 in a
/// division by the wave speed, fewer than three layer equilibria, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure failed to produce a result: no sign change in a
/// bracket, step-size underflow, quadrature non-convergence.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fhn
