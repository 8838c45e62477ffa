#pragma once

#include <functional>

namespace fhn::quad {

struct QuadResult {
    double value;
    double error_estimate;
    int evaluations;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. Throws
/// NumericalError when `abs_tol` is not met within `max_intervals`.
QuadResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                         int max_intervals = 2000);

}  // namespace fhn::quad
