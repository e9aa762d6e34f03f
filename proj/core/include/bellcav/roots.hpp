#pragma once

#include <functional>

namespace bellcav {

/// Root of f in [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
/// Stops once the bracket is narrower than x_tol (default: a few ulps).
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double x_tol = 0.0);

/// First sign change of f scanning outward from 0+ with the given step, refined by bisection.
/// Throws NumericalError if no sign change occurs below `upper`.
double first_root_from_zero(const std::function<double(double)>& f, double step, double upper);

/// Root of (a - b)/(a + b) = tan(4ab) nearest to zero; a = 0 gives 0.
double parity_optimal_beta(double alpha_mag);

}  // namespace bellcav
