#pragma once

// Independent reference computations used only by the tests.

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace ref {

using cplx = std::complex<double>;

/// sum_{n > n_max} e^{-m^2} m^{2n} / n!, by direct long-double summation.
double poisson_tail(double m, int n_max);

/// <m|D(beta)|n> from the associated-Laguerre closed form.
Eigen::MatrixXcd displacement(cplx beta, int N);

/// Binomial photon-loss map on a field density matrix: rho -> sum_k A_k rho A_k^dagger,
/// A_k |n> = sqrt(C(n,k) eta^{n-k} (1-eta)^k) |n-k>.
Eigen::MatrixXcd binomial_loss(const Eigen::MatrixXcd& rho, double eta);

/// Root of f on [lo, hi] by plain halving to width tol.
double halve(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

/// Smallest |beta| with (a - b)/(a + b) = tan(4ab), by a fine forward scan and halving.
double parity_beta(double a);

/// Minimal (t4, t5) of the two light-cone equalities, eliminating t4 from the linear one.
struct LightCone {
    double t4;
    double t5;
};
LightCone light_cone(double t1, double t2, double t3, double t6, double v, double c, bool include_t6);

/// Classical RK4 on a 2x2 atomic density matrix with decay rate gamma (e = index 0).
Eigen::Matrix2cd atom_decay_rk4(const Eigen::Matrix2cd& rho, double gamma, double t, int steps);

}  // namespace ref
