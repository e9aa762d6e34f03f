#pragma once

#include <cmath>

#include "bellcav/qcore.hpp"

namespace bellcav {

struct OnOffSetting {
    OnOffSetting(RotationAngles angles, Complex beta, double eta);

    RotationAngles angles;
    Complex beta;
    double eta;
};

struct IndirectSetting {
    IndirectSetting(RotationAngles angles, Complex beta, double t, double chi);

    RotationAngles angles;
    Complex beta;
    double t;
    double chi;
};

/// Displaced on/off correlation with detector efficiency eta.
double corr_onoff(Complex alpha, const OnOffSetting& s);
double corr_onoff(Complex alpha, double theta, double phi, Complex beta, double eta);

/// Rotation angle of the atomic measurement behind corr_onoff's theta:
/// the matching operator is displaced_gamma(zeta_from_angles(onoff_rotation_angle(theta), phi)).
inline double onoff_rotation_angle(double theta) { return kPi - theta / 2.0; }

/// Displaced parity correlation.
double corr_parity(Complex alpha, const RotationAngles& angles, Complex beta);
double corr_parity(Complex alpha, double theta, double phi, Complex beta);

/// Indirect (probe atom) correlation.
double corr_indirect(Complex alpha, const IndirectSetting& s);
double corr_indirect(Complex alpha, double theta, double phi, Complex beta, double chi_t);

template <class AtomSetting, class FieldSetting>
struct ChshSettings {
    AtomSetting a;
    AtomSetting a_prime;
    FieldSetting b;
    FieldSetting b_prime;
};

/// |E(a,b) + E(a',b) + E(a,b') - E(a',b')|
inline double chsh_combine(double e_ab, double e_apb, double e_abp, double e_apbp)
{
    return std::abs(e_ab + e_apb + e_abp - e_apbp);
}

template <class Corr, class AtomSetting, class FieldSetting>
double bell_chsh(Corr&& E, const ChshSettings<AtomSetting, FieldSetting>& s)
{
    return chsh_combine(E(s.a, s.b), E(s.a_prime, s.b), E(s.a, s.b_prime), E(s.a_prime, s.b_prime));
}

}  // namespace bellcav
