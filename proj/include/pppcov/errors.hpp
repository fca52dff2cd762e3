#pragma once

#include <stdexcept>
#include <string>

namespace pppcov {

// Quadrature ran out of refinement budget before reaching the requested
// tolerance. Carries the best estimate and its error bound.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best, double bound)
        : std::runtime_error(what), best_estimate(best), error_bound(bound) {}

    double best_estimate;
    double error_bound;
};

// A signed summation produced a value outside its admissible range by more
// than rounding-level noise. Indicates a coefficient bug, not roundoff.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pppcov
