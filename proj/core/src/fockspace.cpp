#include "bellcav/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace bellcav {

DensityMatrix::DensityMatrix(std::vector<int> layout, Eigen::MatrixXcd entries)
    : layout_(std::move(layout)), m_(std::move(entries))
{
    if (layout_.empty())
        throw ValidationError("density matrix layout is empty");
    long long total = 1;
    for (int d : layout_) {
        if (d < 1)
            throw ValidationError("layout dimensions must be positive");
        total *= d;
    }
    if (m_.rows() != m_.cols() || m_.rows() != total)
        throw ValidationError("density matrix shape does not match layout");
}

double DensityMatrix::hermiticity_error() const
{
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    const Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double poisson_tail(double m, int n_max)
{
    if (m == 0.0)
        return 0.0;
    const double m2 = m * m;
    const double log_m2 = std::log(m2);
    // terms decay geometrically once n exceeds m^2
    int upper = std::max(n_max + 1, static_cast<int>(m2 + 40.0 * (m + 1.0)));
    double sum = 0.0;
    for (int n = upper; n > n_max; --n)
        sum += std::exp(-m2 + n * log_m2 - std::lgamma(n + 1.0));
    return sum;
}

int choose_truncation(double max_label_magnitude, double tail_tol)
{
    if (!(max_label_magnitude >= 0.0) || !std::isfinite(max_label_magnitude))
        throw ValidationError("label magnitude must be finite and >= 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
        throw ValidationError("tail_tol must lie in (0, 1)");
    int n = 0;
    while (poisson_tail(max_label_magnitude, n) >= tail_tol)
        ++n;
    return n + 10;
}

FockVector coherent_fock(Complex alpha, int N)
{
    if (N < 1)
        throw ValidationError("Fock dimension must be >= 1");
    const double tail = poisson_tail(std::abs(alpha), N - 1);
    if (tail > 1e-8)
        throw ValidationError("Fock truncation too small for coherent amplitude");
    FockVector c(N);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < N; ++n)
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

FockOperator annihilation(int N)
{
    FockOperator a = FockOperator::Zero(N, N);
    for (int n = 1; n < N; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

FockOperator displacement_matrix(Complex beta, int N)
{
    if (N < 1)
        throw ValidationError("Fock dimension must be >= 1");
    if (beta == Complex(0.0, 0.0))
        return FockOperator::Identity(N, N);
    const FockOperator a = annihilation(N);
    const FockOperator gen = beta * a.adjoint() - std::conj(beta) * a;
    return gen.exp();
}

FockOperator measurement_projectors(FieldMeasurement kind, Complex beta, int N)
{
    Eigen::VectorXcd diag(N);
    for (int n = 0; n < N; ++n) {
        if (kind == FieldMeasurement::parity)
            diag(n) = (n % 2 == 0) ? 1.0 : -1.0;
        else
            diag(n) = (n == 0) ? -1.0 : 1.0;
    }
    const FockOperator d = displacement_matrix(beta, N);
    return d * diag.asDiagonal() * d.adjoint();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd dispersive_propagator(double chi, double t, int N)
{
    Eigen::VectorXcd diag(2 * N);
    for (int n = 0; n < N; ++n) {
        diag(n) = std::polar(1.0, -chi * t * (n + 1));
        diag(N + n) = std::polar(1.0, chi * t * n);
    }
    return diag.asDiagonal();
}

DensityMatrix build_entangled_state(Complex alpha, int N, PhaseConvention convention)
{
    Eigen::VectorXcd psi(2 * N);
    if (convention == PhaseConvention::main_text) {
        psi.head(N) = coherent_fock(alpha, N);
        psi.tail(N) = coherent_fock(-alpha, N);
    } else {
        // Ramsey pulse D(-i pi/4) on |e>, field at i alpha, dispersive interaction for chi t = pi/2
        const AtomOperator r = atomic_displacement(Complex(0.0, -kPi / 4.0));
        const FockVector field = coherent_fock(Complex(0.0, 1.0) * alpha, N);
        psi.head(N) = r(0, 0) * field;
        psi.tail(N) = r(1, 0) * field;
        psi = dispersive_propagator(1.0, kPi / 2.0, N) * psi;
    }
    psi.normalize();
    return DensityMatrix({2, N}, psi * psi.adjoint());
}

namespace {

// Column of exp[theta (a^dag b - a b^dag)] on |n, 0> restricted to total photon number n.
Eigen::VectorXd beam_splitter_column(int n, double theta)
{
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n + 1, n + 1);
    // basis index k <-> |n - k>_C |k>_v
    for (int k = 1; k <= n; ++k) {
        const double m = n - k;
        const double amp = std::sqrt((m + 1.0) * k);
        gen(k - 1, k) += theta * amp;
        gen(k, k - 1) -= theta * amp;
    }
    const Eigen::MatrixXd u = gen.exp();
    return u.col(0);
}

}  // namespace

DensityMatrix apply_detector_loss(const DensityMatrix& rho, double eta)
{
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ValidationError("eta must lie in [0, 1]");
    const int N = rho.field_dim();
    const Eigen::Index M = rho.dim() / N;
    const double theta = std::acos(std::sqrt(eta));

    std::vector<Eigen::VectorXd> cols(N);
    for (int n = 0; n < N; ++n)
        cols[n] = beam_splitter_column(n, theta);

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(M, M);
    for (int k = 0; k < N; ++k) {
        Eigen::MatrixXcd kraus = Eigen::MatrixXcd::Zero(N, N);
        for (int n = k; n < N; ++n)
            kraus(n - k, n) = cols[n](k);
        const Eigen::MatrixXcd full = kron(id, kraus);
        out.noalias() += full * rho.matrix() * full.adjoint();
    }
    return DensityMatrix(rho.layout(), out);
}

namespace {

struct LindbladGenerator {
    int N;
    double kappa, gamma, chi;

    Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& r) const
    {
        const int D = 2 * N;
        Eigen::MatrixXcd out(D, D);
        auto energy = [&](int i) {
            const int n = i % N;
            return i < N ? chi * (n + 1) : -chi * n;
        };
        for (int j = 0; j < D; ++j) {
            const int nj = j % N;
            const bool ej = j < N;
            for (int i = 0; i < D; ++i) {
                const int ni = i % N;
                const bool ei = i < N;
                Complex v = Complex(0.0, -(energy(i) - energy(j))) * r(i, j);
                if (kappa != 0.0) {
                    Complex jump = 0.0;
                    if (ni + 1 < N && nj + 1 < N)
                        jump = 2.0 * std::sqrt((ni + 1.0) * (nj + 1.0)) * r(i + 1, j + 1);
                    v += kappa * (jump - static_cast<double>(ni + nj) * r(i, j));
                }
                if (gamma != 0.0) {
                    Complex jump = 0.0;
                    if (!ei && !ej)
                        jump = 2.0 * r(i - N, j - N);
                    v += gamma * (jump - ((ei ? 1.0 : 0.0) + (ej ? 1.0 : 0.0)) * r(i, j));
                }
                out(i, j) = v;
            }
        }
        return out;
    }
};

Eigen::MatrixXcd rk4(const LindbladGenerator& f, Eigen::MatrixXcd r, double t, long steps)
{
    const double h = t / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
        const Eigen::MatrixXcd k1 = f(r);
        const Eigen::MatrixXcd k2 = f(r + 0.5 * h * k1);
        const Eigen::MatrixXcd k3 = f(r + 0.5 * h * k2);
        const Eigen::MatrixXcd k4 = f(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

}  // namespace

DensityMatrix lindblad_evolve(const DensityMatrix& rho, double kappa, double gamma, double chi,
                              double t, int steps)
{
    if (kappa < 0.0 || gamma < 0.0)
        throw ValidationError("rates must be >= 0");
    if (t < 0.0)
        throw ValidationError("evolution time must be >= 0");
    if (steps < 1)
        throw ValidationError("steps must be >= 1");
    if (rho.layout().size() != 2 || rho.layout()[0] != 2)
        throw ValidationError("lindblad_evolve expects layout {2, N}");

    const LindbladGenerator gen{rho.field_dim(), kappa, gamma, chi};
    long n = steps;
    Eigen::MatrixXcd coarse = rk4(gen, rho.matrix(), t, n);
    for (int attempt = 0; attempt < 16; ++attempt) {
        Eigen::MatrixXcd fine = rk4(gen, rho.matrix(), t, 2 * n);
        const double diff = (fine - coarse).cwiseAbs().maxCoeff();
        if (diff < 1e-8)
            return DensityMatrix(rho.layout(), fine);
        coarse = std::move(fine);
        n *= 2;
    }
    throw NumericalError("lindblad_evolve: step halving did not converge");
}

double expectation(const DensityMatrix& rho, const Eigen::MatrixXcd& obs)
{
    if (obs.rows() != rho.dim() || obs.cols() != rho.dim())
        throw ValidationError("observable dimension does not match density matrix");
    const Complex v = (rho.matrix().transpose().array() * obs.array()).sum();
    if (std::abs(v.imag()) > 1e-6)
        throw NumericalError("expectation has a large imaginary part", std::abs(v.imag()));
    return v.real();
}

Eigen::MatrixXcd trace_out_field(const DensityMatrix& rho)
{
    const int N = rho.field_dim();
    const Eigen::Index M = rho.dim() / N;
    Eigen::MatrixXcd out(M, M);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            out(i, j) = rho.matrix().block(i * N, j * N, N, N).trace();
    return out;
}

double fidelity(const FockVector& a, const FockVector& b)
{
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

double fock_onoff_correlation(Complex alpha, double theta_rot, double phi, Complex beta, double eta, int N)
{
    const DensityMatrix rho = apply_detector_loss(build_entangled_state(alpha, N, PhaseConvention::main_text), eta);
    const AtomOperator g = displaced_gamma(zeta_from_angles(theta_rot, phi));
    return expectation(rho, kron(g, measurement_projectors(FieldMeasurement::onoff, beta, N)));
}

double fock_parity_correlation(Complex alpha, double theta, double phi, Complex beta, int N)
{
    const DensityMatrix rho = build_entangled_state(alpha, N, PhaseConvention::main_text);
    const AtomOperator g = displaced_gamma(zeta_from_angles(theta, phi));
    return expectation(rho, kron(g, measurement_projectors(FieldMeasurement::parity, beta, N)));
}

double fock_indirect_correlation(Complex alpha, double theta, double phi, Complex beta, double chi_t, int N)
{
    const AtomOperator pulse = atomic_displacement(Complex(0.0, -kPi / 4.0));
    const Eigen::Vector2cd probe = pulse.col(0);
    const Eigen::MatrixXcd u = dispersive_propagator(1.0, chi_t, N);
    Eigen::Matrix2cd sx;
    sx << 0.0, 1.0, 1.0, 0.0;
    const Eigen::MatrixXcd heis = u.adjoint() * kron(sx, Eigen::MatrixXcd::Identity(N, N)) * u;

    // field operator left after averaging over the probe state
    Eigen::MatrixXcd field_obs = Eigen::MatrixXcd::Zero(N, N);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            field_obs += std::conj(probe(a)) * probe(b) * heis.block(a * N, b * N, N, N);

    const FockOperator d = displacement_matrix(beta, N);
    const DensityMatrix rho = build_entangled_state(alpha, N, PhaseConvention::main_text);
    const AtomOperator g = displaced_gamma(zeta_from_angles(theta, phi));
    return expectation(rho, kron(g, d * field_obs * d.adjoint()));
}

}  // namespace bellcav
