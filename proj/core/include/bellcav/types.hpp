#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bellcav {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Invalid input (range, shape or configuration).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double error_estimate = 0.0)
        : std::runtime_error(what), error_estimate_(error_estimate) {}
    double error_estimate() const { return error_estimate_; }

private:
    double error_estimate_;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// arg(0) := 0
inline double safe_arg(Complex z) { return z == Complex(0.0, 0.0) ? 0.0 : std::arg(z); }

}  // namespace bellcav
