#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bellcav/qcore.hpp"

namespace bellcav {

using FockVector = Eigen::VectorXcd;
using FockOperator = Eigen::MatrixXcd;

/// Dense density matrix over a tensor-product layout, e.g. {2, N} or {2, 2, N}.
/// The last mode is the field when a field is present.
class DensityMatrix {
public:
    DensityMatrix(std::vector<int> layout, Eigen::MatrixXcd entries);

    const std::vector<int>& layout() const { return layout_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    int field_dim() const { return layout_.back(); }

    Complex trace() const { return m_.trace(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;

private:
    std::vector<int> layout_;
    Eigen::MatrixXcd m_;
};

enum class FieldMeasurement { onoff, parity };
enum class PhaseConvention { main_text, appendix_b };

/// Poisson tail sum_{n > n_max} e^{-m^2} m^{2n}/n!.
double poisson_tail(double m, int n_max);

/// Smallest n_max with poisson_tail(m, n_max) < tail_tol, plus a 10-level buffer.
int choose_truncation(double max_label_magnitude, double tail_tol = 1e-12);

FockVector coherent_fock(Complex alpha, int N);
FockOperator annihilation(int N);
FockOperator displacement_matrix(Complex beta, int N);
FockOperator measurement_projectors(FieldMeasurement kind, Complex beta, int N);

/// Entangled atom-field state on layout {2, N}.
DensityMatrix build_entangled_state(Complex alpha, int N, PhaseConvention convention);

/// Photodetector loss on the last (field) mode through a beam splitter with a vacuum ancilla.
DensityMatrix apply_detector_loss(const DensityMatrix& rho, double eta);

/// Diagonal e^{-i H_I t} on {2, N}.
Eigen::MatrixXcd dispersive_propagator(double chi, double t, int N);

/// Fourth-order integration of the dispersive master equation on layout {2, N}.
/// The step count is doubled until halving the step changes the result by < 1e-8.
DensityMatrix lindblad_evolve(const DensityMatrix& rho, double kappa, double gamma, double chi,
                              double t, int steps);

/// Re Tr[rho obs]; throws if the imaginary part exceeds 1e-6.
double expectation(const DensityMatrix& rho, const Eigen::MatrixXcd& obs);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Trace out the last mode.
Eigen::MatrixXcd trace_out_field(const DensityMatrix& rho);

/// |<a|b>|^2 for normalized vectors.
double fidelity(const FockVector& a, const FockVector& b);

/// Tr[rho (Gamma(zeta) (x) O_onoff(beta))] on the entangled state after detector loss,
/// zeta = zeta_from_angles(theta_rot, phi).
double fock_onoff_correlation(Complex alpha, double theta_rot, double phi, Complex beta, double eta, int N);

/// Tr[rho (Gamma(zeta) (x) D(beta) (-1)^n D(beta)^dagger)] on the entangled state.
double fock_parity_correlation(Complex alpha, double theta, double phi, Complex beta, int N);

/// Atom A read out with Gamma(zeta); the field is displaced by -beta and probed by a second atom
/// prepared by the pulse D(-i pi/4)|e>, coupled dispersively for chi_t and read out with sigma_x.
double fock_indirect_correlation(Complex alpha, double theta, double phi, Complex beta, double chi_t, int N);

}  // namespace bellcav
