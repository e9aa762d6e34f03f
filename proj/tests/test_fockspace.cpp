#include <random>

#include <gtest/gtest.h>

#include "bellcav/correlators.hpp"
#include "bellcav/decoherence.hpp"
#include "bellcav/fockspace.hpp"
#include "oracles/reference.hpp"

using namespace bellcav;

namespace {

const Complex I(0.0, 1.0);

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix field_state(const FockVector& v)
{
    return DensityMatrix({v.size() == 0 ? 1 : static_cast<int>(v.size())}, v * v.adjoint());
}

DensityMatrix atom_field(const Eigen::Vector2cd& atom, const FockVector& field)
{
    const int N = static_cast<int>(field.size());
    Eigen::VectorXcd psi(2 * N);
    psi.head(N) = atom(0) * field;
    psi.tail(N) = atom(1) * field;
    return DensityMatrix({2, N}, psi * psi.adjoint());
}

}  // namespace

TEST(Truncation, Examples)
{
    EXPECT_EQ(choose_truncation(0.0, 1e-12), 10);
    const int n1 = choose_truncation(1.0, 1e-12);
    // n1 - 10 is the last retained level: the tail beyond it is below tol, the one before is not
    EXPECT_LT(ref::poisson_tail(1.0, n1 - 10), 1e-12);
    EXPECT_GE(ref::poisson_tail(1.0, n1 - 11), 1e-12);
    EXPECT_GE(choose_truncation(2.0, 1e-12), n1);
}

TEST(Truncation, TailMatchesDirectSum)
{
    for (double m : {0.3, 1.0, 2.5})
        for (int n : {2, 8, 20})
            EXPECT_NEAR(poisson_tail(m, n), ref::poisson_tail(m, n), 1e-13 + 1e-10 * ref::poisson_tail(m, n));
}

TEST(CoherentFock, Examples)
{
    const FockVector vac = coherent_fock(0.0, 12);
    EXPECT_NEAR(std::abs(vac(0) - 1.0), 0.0, 1e-15);
    EXPECT_LT(vac.tail(11).norm(), 1e-15);

    const FockVector c = coherent_fock(1.0, 40);
    double mean = 0.0;
    for (int n = 0; n < 40; ++n)
        mean += n * std::norm(c(n));
    EXPECT_NEAR(mean, 1.0, 1e-9);

    const Complex ov = coherent_fock(1.0, 40).dot(coherent_fock(-1.0, 40));
    EXPECT_NEAR(std::abs(ov - coherent_overlap(1.0, -1.0)), 0.0, 1e-9);
    EXPECT_NEAR(ov.real(), std::exp(-2.0), 1e-9);
}

TEST(CoherentFock, RejectsShortTruncation)
{
    EXPECT_THROW(coherent_fock(3.0, 5), ValidationError);
}

TEST(Displacement, MatchesLaguerreClosedForm)
{
    EXPECT_LT(max_abs(displacement_matrix(0.0, 40) - Eigen::MatrixXcd::Identity(40, 40)), 1e-15);
    for (Complex b : {Complex(0.4, 0.0), Complex(-0.9, 0.6), Complex(0.0, 1.5), Complex(1.4, -1.4)}) {
        // retained levels of the chosen truncation, computed with extra room above them
        const int keep = choose_truncation(std::abs(b)) - 10;
        const int N = keep + 30;
        const Eigen::MatrixXcd d = displacement_matrix(b, N);
        const Eigen::MatrixXcd r = ref::displacement(b, N);
        EXPECT_LT(max_abs((d - r).topLeftCorner(keep, keep)), 1e-8) << b;
    }
}

TEST(Displacement, VacuumGivesCoherentState)
{
    const int N = choose_truncation(2.0);
    for (Complex b : {Complex(2.0, 0.0), Complex(-1.2, 1.4), Complex(0.0, -0.5)}) {
        const FockVector v = displacement_matrix(b, N).col(0);
        const FockVector c = coherent_fock(b, N);
        EXPECT_LT((v - c).head(N - 10).cwiseAbs().maxCoeff(), 1e-8) << b;
    }
}

TEST(Displacement, UnitaryOnInnerBlock)
{
    const int N = choose_truncation(2.0);
    const Eigen::MatrixXcd d = displacement_matrix(Complex(1.3, -1.1), N);
    const Eigen::MatrixXcd e = d * d.adjoint() - Eigen::MatrixXcd::Identity(N, N);
    EXPECT_LT(max_abs(e.topLeftCorner(N - 10, N - 10)), 1e-8);
}

TEST(Projectors, Examples)
{
    const int N = 40;
    const DensityMatrix vac = field_state(coherent_fock(0.0, N));
    EXPECT_NEAR(expectation(vac, measurement_projectors(FieldMeasurement::parity, 0.0, N)), 1.0, 1e-12);

    const DensityMatrix one = field_state(coherent_fock(1.0, N));
    EXPECT_NEAR(expectation(one, measurement_projectors(FieldMeasurement::parity, 0.0, N)), std::exp(-2.0), 1e-8);

    const Complex bp(0.7, -0.8);
    const DensityMatrix c = field_state(coherent_fock(bp, N));
    EXPECT_NEAR(expectation(c, measurement_projectors(FieldMeasurement::onoff, 0.0, N)),
                1.0 - 2.0 * std::exp(-std::norm(bp)), 1e-8);
}

TEST(Projectors, HermitianWithUnitSpectrum)
{
    const int N = choose_truncation(1.5);
    for (auto kind : {FieldMeasurement::onoff, FieldMeasurement::parity}) {
        const Eigen::MatrixXcd o = measurement_projectors(kind, Complex(0.8, 0.5), N);
        EXPECT_LT(max_abs(o - o.adjoint()), 1e-12);
        const Eigen::MatrixXcd sq = o * o - Eigen::MatrixXcd::Identity(N, N);
        EXPECT_LT(max_abs(sq.topLeftCorner(N - 10, N - 10)), 1e-8);
    }
}

TEST(EntangledState, Examples)
{
    const int N = 30;
    const DensityMatrix prod = build_entangled_state(0.0, N, PhaseConvention::main_text);
    Eigen::Vector2cd plus(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    EXPECT_LT(max_abs(prod.matrix() - atom_field(plus, coherent_fock(0.0, N)).matrix()), 1e-12);

    const DensityMatrix rho = build_entangled_state(0.664, N, PhaseConvention::main_text);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-9);
    EXPECT_LT(rho.hermiticity_error(), 1e-12);

    const DensityMatrix r1 = build_entangled_state(1.0, N, PhaseConvention::main_text);
    const Eigen::MatrixXcd atom = trace_out_field(r1);
    EXPECT_NEAR(std::abs(atom(0, 1) - std::exp(-2.0) / 2.0), 0.0, 1e-8);
}

TEST(EntangledState, AppendixConventionIsTheIdealPreparation)
{
    // Ramsey-prepared atom with field i alpha, dispersive interaction for chi t = pi/2
    const int N = 40;
    const Complex alpha(0.6, 0.2);
    const DensityMatrix rho = build_entangled_state(alpha, N, PhaseConvention::appendix_b);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-9);
    // atom populations are balanced and the field labels are i alpha rotated by -/+ pi/2
    const Eigen::MatrixXcd atom = trace_out_field(rho);
    EXPECT_NEAR(atom(0, 0).real(), 0.5, 1e-9);
    const Eigen::MatrixXcd ee = rho.matrix().topLeftCorner(N, N) * 2.0;
    const FockVector e_label = coherent_fock(I * alpha * std::exp(-I * kPi / 2.0), N);
    EXPECT_NEAR((e_label.adjoint() * ee * e_label)(0, 0).real(), 1.0, 1e-8);
    const Eigen::MatrixXcd gg = rho.matrix().bottomRightCorner(N, N) * 2.0;
    const FockVector g_label = coherent_fock(I * alpha * std::exp(I * kPi / 2.0), N);
    EXPECT_NEAR((g_label.adjoint() * gg * g_label)(0, 0).real(), 1.0, 1e-8);
}

TEST(DetectorLoss, Examples)
{
    const int N = 30;
    const DensityMatrix rho = build_entangled_state(1.0, N, PhaseConvention::main_text);
    EXPECT_LT(max_abs(apply_detector_loss(rho, 1.0).matrix() - rho.matrix()), 1e-10);

    const DensityMatrix gone = apply_detector_loss(rho, 0.0);
    const Eigen::MatrixXcd atom = trace_out_field(gone);
    EXPECT_NEAR(std::abs(atom(0, 1)) * 2.0, std::exp(-2.0), 1e-8);
    // field collapsed to vacuum in every block
    EXPECT_NEAR(gone.matrix()(0, 0).real() + gone.matrix()(N, N).real(), 1.0, 1e-8);

    // eta = 1/2: cross dyad weight e^{-2(1-eta)|alpha|^2} = e^{-1} times the overlap of the shrunken labels
    const DensityMatrix half = apply_detector_loss(rho, 0.5);
    const Complex cross = trace_out_field(half)(0, 1) * 2.0;
    const Complex shrunk = coherent_overlap(-std::sqrt(0.5), std::sqrt(0.5));
    EXPECT_NEAR(std::abs(cross / shrunk), std::exp(-1.0), 1e-8);
    EXPECT_THROW(apply_detector_loss(rho, 1.2), ValidationError);
}

TEST(DetectorLoss, MatchesBinomialChannel)
{
    const int N = 25;
    const DensityMatrix rho = build_entangled_state(Complex(0.8, -0.3), N, PhaseConvention::main_text);
    for (double eta : {0.2, 0.55, 0.9}) {
        const Eigen::MatrixXcd out = apply_detector_loss(rho, eta).matrix();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Eigen::MatrixXcd blk = rho.matrix().block(a * N, b * N, N, N);
                EXPECT_LT(max_abs(out.block(a * N, b * N, N, N) - ref::binomial_loss(blk, eta)), 1e-12);
            }
        const DensityMatrix lossy = apply_detector_loss(rho, eta);
        EXPECT_NEAR(std::abs(lossy.trace() - 1.0), 0.0, 1e-8);
        EXPECT_GT(lossy.min_eigenvalue(), -1e-8);
    }
}

TEST(Propagator, Examples)
{
    const int N = choose_truncation(1.0);
    EXPECT_LT(max_abs(dispersive_propagator(2.0, 0.0, N) - Eigen::MatrixXcd::Identity(2 * N, 2 * N)), 1e-15);

    const double chi = 3.0, t = 0.37;
    const Complex alpha(0.7, 0.4);
    Eigen::VectorXcd g(2 * N);
    g.setZero();
    g.tail(N) = coherent_fock(alpha, N);
    const Eigen::VectorXcd out = dispersive_propagator(chi, t, N) * g;
    EXPECT_GT(fidelity(out.tail(N), coherent_fock(alpha * std::exp(I * chi * t), N)), 1.0 - 1e-8);

    Eigen::VectorXcd e(2 * N);
    e.setZero();
    e.head(N) = coherent_fock(alpha, N);
    const Eigen::VectorXcd out_e = dispersive_propagator(1.0, kPi / 2.0, N) * e;
    EXPECT_GT(fidelity(out_e.head(N), coherent_fock(alpha * std::exp(-I * kPi / 2.0), N)), 1.0 - 1e-8);
}

TEST(Lindblad, IdentityWithoutDynamics)
{
    const int N = 20;
    const DensityMatrix rho = build_entangled_state(0.5, N, PhaseConvention::main_text);
    EXPECT_LT(max_abs(lindblad_evolve(rho, 0.0, 0.0, 0.0, 1.3, 4).matrix() - rho.matrix()), 1e-10);
}

TEST(Lindblad, PureDissipationShrinksLabels)
{
    const int N = choose_truncation(1.0);
    const Complex alpha(0.8, 0.3);
    const double kappa = 0.5, t = 0.7;
    Eigen::Vector2cd g(0.0, 1.0);
    const DensityMatrix rho = atom_field(g, coherent_fock(alpha, N));
    const DensityMatrix out = lindblad_evolve(rho, kappa, 0.0, 0.0, t, 16);
    const CoherentDyad d = dissipate_dyad({1.0, alpha, alpha}, kappa, t);
    const FockVector expected = coherent_fock(d.mu, N);
    const Eigen::MatrixXcd field = out.matrix().bottomRightCorner(N, N);
    EXPECT_GT((expected.adjoint() * field * expected)(0, 0).real(), 1.0 - 1e-6);
    EXPECT_NEAR(std::abs(out.trace() - 1.0), 0.0, 1e-8);
}

TEST(Lindblad, AtomicDecayPopulation)
{
    const int N = 10;
    Eigen::Vector2cd e(1.0, 0.0);
    const DensityMatrix rho = atom_field(e, coherent_fock(0.0, N));
    const double gamma = 13.8889, t = 80e-6;
    const DensityMatrix out = lindblad_evolve(rho, 0.0, gamma, 0.0, t, 4);
    EXPECT_NEAR(trace_out_field(out)(0, 0).real(), std::exp(-2.0 * gamma * t), 1e-7);
    EXPECT_NEAR(std::exp(-2.0 * gamma * t), 0.997780, 1e-6);
}

TEST(Lindblad, InvariantsAlongTrajectory)
{
    const int N = choose_truncation(1.0);
    DensityMatrix rho = build_entangled_state(Complex(0.6, 0.2), N, PhaseConvention::main_text);
    const double chi = 1.0, kappa = 0.05, gamma = 0.05;
    for (int k = 0; k < 4; ++k) {
        rho = lindblad_evolve(rho, kappa, gamma, chi, kPi / 4.0, 8);
        EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-8);
        EXPECT_LT(rho.hermiticity_error(), 1e-9);
        EXPECT_GT(rho.min_eigenvalue(), -1e-7);
    }
    EXPECT_THROW(lindblad_evolve(rho, -1.0, 0.0, 0.0, 1.0, 4), ValidationError);
    EXPECT_THROW(lindblad_evolve(rho, 0.0, 0.0, 0.0, -1.0, 4), ValidationError);
}

TEST(Expectation, BasicsAndRejection)
{
    const int N = 12;
    const DensityMatrix vac = field_state(coherent_fock(0.0, N));
    EXPECT_NEAR(expectation(vac, Eigen::MatrixXcd::Identity(N, N)), 1.0, 1e-15);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(N, N);
    bad(0, 0) = I;
    EXPECT_THROW(expectation(vac, bad), NumericalError);
    EXPECT_THROW(expectation(vac, Eigen::MatrixXcd::Identity(N + 1, N + 1)), ValidationError);
}

TEST(Expectation, JointOnOffAtUnitEfficiency)
{
    const int N = choose_truncation(2.0);
    const Complex alpha(0.664, 0.0), beta(0.478, 0.1);
    const double th = 2.0, ph = 0.5;
    const DensityMatrix rho = build_entangled_state(alpha, N, PhaseConvention::main_text);
    const AtomOperator g = displaced_gamma(zeta_from_angles(onoff_rotation_angle(th), ph));
    const double e = expectation(rho, kron(g, measurement_projectors(FieldMeasurement::onoff, beta, N)));
    EXPECT_NEAR(e, corr_onoff(alpha, th, ph, beta, 1.0), 1e-8);
}

TEST(Oracle, ProbeChainReproducesParityAtHalfPi)
{
    const int N = choose_truncation(3.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const Complex alpha = std::polar(1.5 * u(rng), 2.0 * kPi * u(rng));
        const Complex beta = std::polar(1.5 * u(rng), 2.0 * kPi * u(rng));
        const double th = kPi * u(rng), ph = 2.0 * kPi * u(rng);
        EXPECT_NEAR(fock_indirect_correlation(alpha, th, ph, beta, kPi / 2.0, N), corr_parity(alpha, th, ph, beta), 1e-6);
        EXPECT_NEAR(fock_parity_correlation(alpha, th, ph, beta, N), corr_parity(alpha, th, ph, beta), 1e-7);
    }
}
