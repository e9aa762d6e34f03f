#include "bellcav/qcore.hpp"

#include <cmath>

namespace bellcav {

RotationAngles::RotationAngles(double theta, double phi) : theta_(theta), phi_(phi)
{
    if (!std::isfinite(theta) || theta < 0.0 || theta > kPi)
        throw ValidationError("theta must lie in [0, pi]");
    if (!std::isfinite(phi) || phi < 0.0 || phi >= 2.0 * kPi)
        throw ValidationError("phi must lie in [0, 2pi)");
}

Complex zeta_from_angles(double theta, double phi)
{
    return -(theta / 2.0) * std::polar(1.0, -phi);
}

Complex zeta_from_angles(const RotationAngles& angles)
{
    return zeta_from_angles(angles.theta(), angles.phi());
}

AtomOperator atomic_displacement(Complex zeta)
{
    const double mag = std::abs(zeta);
    if (mag == 0.0)
        return AtomOperator::Identity();
    const Complex u = zeta / mag;
    const double c = std::cos(mag);
    const double s = std::sin(mag);
    AtomOperator d;
    d << c, u * s,
         -std::conj(u) * s, c;
    return d;
}

AtomOperator gamma_operator()
{
    AtomOperator g = AtomOperator::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = -1.0;
    return g;
}

AtomOperator displaced_gamma(Complex zeta)
{
    const AtomOperator d = atomic_displacement(zeta);
    return d * gamma_operator() * d.adjoint();
}

Complex coherent_overlap(Complex mu, Complex nu)
{
    return std::exp(-0.5 * std::norm(mu) - 0.5 * std::norm(nu) + std::conj(mu) * nu);
}

}  // namespace bellcav
