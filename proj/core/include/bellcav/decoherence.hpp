#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bellcav/quadrature.hpp"
#include "bellcav/qcore.hpp"

namespace bellcav {

/// Rates in 1/s, chi in rad/s.
struct DecoherenceParams {
    double kappa = 0.0;
    double gamma0 = 0.0;
    double gammac = 0.0;
    double gammap = 0.0;
    double chi = 0.0;

    void validate() const;
};

/// Segment durations in s and atomic velocity in m/s.
struct Timeline {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;
    double t5 = 0.0;
    double t6 = 0.0;
    double v = 0.0;

    void validate() const;
};

/// Timeline whose atom-A flight covers separation l: t4 = l/v - t5.
Timeline timeline_for_separation(Timeline base, double l);

/// weight |mu><nu|
struct CoherentDyad {
    Complex weight;
    Complex mu;
    Complex nu;
};

/// weight <nu|mu>
Complex dyad_trace(const CoherentDyad& d);

/// D(shift) (weight |mu><nu|) D(shift)^dagger
CoherentDyad displace_dyad(const CoherentDyad& d, Complex shift);

/// Integral of a dyad-valued integrand over [lower, upper].
struct IntegralTerm {
    double lower = 0.0;
    double upper = 0.0;
    std::function<CoherentDyad(double)> integrand;
};

/// Apply a dyad map to every node of an integral term.
IntegralTerm map_integral(const IntegralTerm& term, std::function<CoherentDyad(const CoherentDyad&)> f);

enum class Block { ee, eg, ge, gg };

struct BlockTerms {
    std::vector<CoherentDyad> dyads;
    std::vector<IntegralTerm> integrals;
};

/// Atom-field state sum_ij |i><j| (x) (dyads + integrals) in the (e, g) basis.
struct AtomFieldMixture {
    std::array<BlockTerms, 4> blocks;

    BlockTerms& operator[](Block b) { return blocks[static_cast<int>(b)]; }
    const BlockTerms& operator[](Block b) const { return blocks[static_cast<int>(b)]; }

    /// Sum of the ee and gg traces, integrals by adaptive quadrature.
    Complex trace(const QuadratureOptions& opts = {}) const;
};

/// Result of evolving one block. `feeding` is the gg population fed by decay of an ee source.
struct BlockEvolution {
    CoherentDyad dyad;
    std::optional<IntegralTerm> feeding;
};

/// Spontaneous emission on a 2x2 atomic density matrix.
Eigen::Matrix2cd spont_emission_map(const Eigen::Matrix2cd& rho, double gamma, double t);

/// Cavity dissipation of a dyad.
CoherentDyad dissipate_dyad(const CoherentDyad& d, double kappa, double t);

/// -1/2(|nu|^2 + |mu|^2)(1 - e^{-2 kappa t}) + (kappa/r)(1 - e^{-2 r t}) nu* mu, r = kappa + i chi
Complex theta_fn(double kappa, double chi, Complex mu, Complex nu, double t);

/// Dispersive interaction with cavity loss p.kappa and atomic decay p.gammac for time t.
/// For Block::gg the feeding integral from `ee_source` (the ee block at time 0) is attached.
BlockEvolution interact_block(Block block, const CoherentDyad& d, const DecoherenceParams& p, double t,
                              std::optional<CoherentDyad> ee_source = std::nullopt);

/// Same as interact_block with explicit rates.
BlockEvolution evolve_block(Block block, const CoherentDyad& d, double kappa, double gamma, double chi,
                            double t, std::optional<CoherentDyad> ee_source = std::nullopt);

/// Atom after decay for t1, the first Ramsey pulse and decay for t2.
Eigen::Matrix2cd prepare_atom_A(const DecoherenceParams& p, double t1, double t2);

/// Atom-A/field state right before the probe atom enters (after the field displacement by -beta).
AtomFieldMixture pipeline_state(Complex alpha, Complex beta, const DecoherenceParams& p, const Timeline& tl);

/// Trace over the field of the probe-atom/field state generated from one field dyad:
/// entries (ee, eg, ge, gg).
Eigen::Matrix2cd mho_b(Complex mu, Complex nu, const DecoherenceParams& p, const Timeline& tl,
                       const QuadratureOptions& opts = {});

/// Closed-form correlation at the end of the pipeline.
double final_correlation(double phi, Complex beta, const DecoherenceParams& p, const Timeline& tl,
                         Complex alpha, const QuadratureOptions& opts = {});

/// Correlation obtained by composing the pipeline state with exact final-stage maps.
double staged_correlation(const AtomFieldMixture& mixture, double phi, const DecoherenceParams& p,
                          const Timeline& tl, const QuadratureOptions& opts = {});

/// Root nearest zero of the parity optimality condition with alpha damped by e^{-kappa(t3+t4)}.
double solve_beta_decoh(double alpha_mag, double kappa, double t3, double t4);

/// CHSH value at phi = (0, pi/2) and beta = -beta' = i|beta| with |beta| from solve_beta_decoh.
double decohered_bell_default_settings(double alpha_mag, const DecoherenceParams& p, const Timeline& tl,
                                       const QuadratureOptions& opts = {});

/// Field-state materialization on N Fock levels.
Eigen::MatrixXcd dyad_to_fock(const CoherentDyad& d, int N);
Eigen::MatrixXcd integral_to_fock(const IntegralTerm& term, int N);

}  // namespace bellcav
