#pragma once

#include <Eigen/Dense>

#include "bellcav/types.hpp"

namespace bellcav {

/// 2x2 operator in the (|e>, |g>) basis.
using AtomOperator = Eigen::Matrix2cd;

/// Ramsey rotation angles, theta in [0, pi], phi in [0, 2pi).
class RotationAngles {
public:
    RotationAngles(double theta, double phi);

    double theta() const { return theta_; }
    double phi() const { return phi_; }

private:
    double theta_;
    double phi_;
};

/// zeta = -(theta/2) e^{-i phi}
Complex zeta_from_angles(const RotationAngles& angles);
Complex zeta_from_angles(double theta, double phi);

/// exp[zeta sigma_+ - zeta* sigma_-]; identity at zeta = 0.
AtomOperator atomic_displacement(Complex zeta);

/// diag(1, -1)
AtomOperator gamma_operator();

/// D(zeta) Gamma D(zeta)^dagger
AtomOperator displaced_gamma(Complex zeta);

/// <mu|nu> for coherent states.
Complex coherent_overlap(Complex mu, Complex nu);

}  // namespace bellcav
