#pragma once

#include <functional>

#include "bellcav/types.hpp"

namespace bellcav {

struct QuadratureResult {
    Complex value;
    double error;
};

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    unsigned max_depth = 20;
    double* max_error = nullptr;  ///< raised to the largest error estimate seen
};

/// Adaptive Gauss-Kronrod integral of a complex integrand over [a, b].
/// Throws NumericalError carrying the achieved error estimate when the target is missed.
QuadratureResult integrate(const std::function<Complex(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Fixed 30-point Gauss-Legendre nodes mapped to [a, b].
struct GaussNode {
    double t;
    double w;
};
std::vector<GaussNode> gauss_legendre_nodes(double a, double b);

}  // namespace bellcav
