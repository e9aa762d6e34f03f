#include "bellcav/correlators.hpp"

namespace bellcav {

OnOffSetting::OnOffSetting(RotationAngles angles_, Complex beta_, double eta_)
    : angles(angles_), beta(beta_), eta(eta_)
{
    if (!is_finite(beta))
        throw ValidationError("beta must be finite");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ValidationError("eta must lie in [0, 1]");
}

IndirectSetting::IndirectSetting(RotationAngles angles_, Complex beta_, double t_, double chi_)
    : angles(angles_), beta(beta_), t(t_), chi(chi_)
{
    if (!is_finite(beta))
        throw ValidationError("beta must be finite");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("t must be >= 0");
    if (!(chi > 0.0) || !std::isfinite(chi))
        throw ValidationError("chi must be > 0");
}

double corr_onoff(Complex alpha, double theta, double phi, Complex beta, double eta)
{
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    const double Phi = safe_arg(beta) - safe_arg(alpha);
    const double se = std::sqrt(eta);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const double base = -b * b - a * a * eta;
    const double x = 2.0 * a * b * se * std::cos(Phi);
    return -std::exp(base - x) * c
           + std::exp(base + x) * c
           + std::exp(-2.0 * a * a) * std::cos(phi) * s
           - 2.0 * std::exp(-2.0 * a * a - b * b + a * a * eta)
                 * std::cos(phi - 2.0 * a * b * se * std::sin(Phi)) * s;
}

double corr_onoff(Complex alpha, const OnOffSetting& s)
{
    return corr_onoff(alpha, s.angles.theta(), s.angles.phi(), s.beta, s.eta);
}

double corr_parity(Complex alpha, double theta, double phi, Complex beta)
{
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    const double Phi = safe_arg(beta) - safe_arg(alpha);
    const double damp = -2.0 * (a * a + b * b);
    const double x = 4.0 * a * b * std::cos(Phi);
    // e^{damp} sinh(x) without forming sinh(x) alone
    const double sinh_term = 0.5 * (std::exp(damp + x) - std::exp(damp - x));
    return std::exp(-2.0 * b * b) * std::sin(theta) * std::cos(4.0 * a * b * std::sin(Phi) - phi)
           + std::cos(theta) * sinh_term;
}

double corr_parity(Complex alpha, const RotationAngles& angles, Complex beta)
{
    return corr_parity(alpha, angles.theta(), angles.phi(), beta);
}

double corr_indirect(Complex alpha, double theta, double phi, Complex beta, double chi_t)
{
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    const double Phi = safe_arg(beta) - safe_arg(alpha);
    const double c2 = std::cos(2.0 * chi_t);
    const double s2 = std::sin(2.0 * chi_t);
    const double p = a * a + b * b - 2.0 * a * b * std::cos(Phi);
    const double m = a * a + b * b + 2.0 * a * b * std::cos(Phi);
    const double d = a * a - b * b;
    const double S = 2.0 * a * b * std::sin(Phi);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    return 0.5 * ct * std::exp(p * (c2 - 1.0)) * std::cos(p * s2)
           - 0.5 * ct * std::exp(m * (c2 - 1.0)) * std::cos(m * s2)
           + 0.5 * st * std::exp(-a * a - b * b - d * c2 - S * s2) * std::cos(phi - d * s2 + S * (c2 - 1.0))
           + 0.5 * st * std::exp(-a * a - b * b - d * c2 + S * s2) * std::cos(phi + d * s2 + S * (c2 - 1.0));
}

double corr_indirect(Complex alpha, const IndirectSetting& s)
{
    return corr_indirect(alpha, s.angles.theta(), s.angles.phi(), s.beta, s.chi * s.t);
}

}  // namespace bellcav
