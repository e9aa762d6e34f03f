#include "bellcav/decoherence.hpp"

#include <cmath>

#include "bellcav/fockspace.hpp"
#include "bellcav/roots.hpp"

namespace bellcav {

namespace {

const Complex I(0.0, 1.0);

void require_nonneg(double x, const char* what)
{
    if (!(x >= 0.0) || !std::isfinite(x))
        throw ValidationError(std::string(what) + " must be finite and >= 0");
}

}  // namespace

void DecoherenceParams::validate() const
{
    require_nonneg(kappa, "kappa");
    require_nonneg(gamma0, "gamma0");
    require_nonneg(gammac, "gammac");
    require_nonneg(gammap, "gammap");
    require_nonneg(chi, "chi");
}

void Timeline::validate() const
{
    require_nonneg(t1, "t1");
    require_nonneg(t2, "t2");
    require_nonneg(t3, "t3");
    require_nonneg(t4, "t4");
    require_nonneg(t5, "t5");
    require_nonneg(t6, "t6");
    require_nonneg(v, "v");
}

Timeline timeline_for_separation(Timeline base, double l)
{
    require_nonneg(l, "separation");
    if (!(base.v > 0.0))
        throw ValidationError("velocity must be > 0");
    base.t4 = l / base.v - base.t5;
    if (base.t4 < 0.0)
        throw ValidationError("separation too short for t5");
    return base;
}

Complex dyad_trace(const CoherentDyad& d)
{
    return d.weight * coherent_overlap(d.nu, d.mu);
}

CoherentDyad displace_dyad(const CoherentDyad& d, Complex shift)
{
    const double phase = std::imag(shift * std::conj(d.mu)) - std::imag(shift * std::conj(d.nu));
    return {d.weight * std::polar(1.0, phase), d.mu + shift, d.nu + shift};
}

IntegralTerm map_integral(const IntegralTerm& term, std::function<CoherentDyad(const CoherentDyad&)> f)
{
    auto inner = term.integrand;
    return {term.lower, term.upper, [inner, f](double t) { return f(inner(t)); }};
}

Complex AtomFieldMixture::trace(const QuadratureOptions& opts) const
{
    Complex tr = 0.0;
    for (Block b : {Block::ee, Block::gg}) {
        for (const auto& d : (*this)[b].dyads)
            tr += dyad_trace(d);
        for (const auto& term : (*this)[b].integrals) {
            auto f = term.integrand;
            tr += integrate([f](double t) { return dyad_trace(f(t)); }, term.lower, term.upper, opts).value;
        }
    }
    return tr;
}

Eigen::Matrix2cd spont_emission_map(const Eigen::Matrix2cd& rho, double gamma, double t)
{
    require_nonneg(gamma, "gamma");
    require_nonneg(t, "t");
    const double pop = std::exp(-2.0 * gamma * t);
    const double coh = std::exp(-gamma * t);
    Eigen::Matrix2cd out;
    out(0, 0) = pop * rho(0, 0);
    out(0, 1) = coh * rho(0, 1);
    out(1, 0) = coh * rho(1, 0);
    out(1, 1) = rho(1, 1) - rho(0, 0) * (pop - 1.0);
    return out;
}

CoherentDyad dissipate_dyad(const CoherentDyad& d, double kappa, double t)
{
    require_nonneg(kappa, "kappa");
    require_nonneg(t, "t");
    const double loss = -std::expm1(-2.0 * kappa * t);
    const Complex expo = -0.5 * (std::norm(d.mu) + std::norm(d.nu) - 2.0 * std::conj(d.nu) * d.mu) * loss;
    const double shrink = std::exp(-kappa * t);
    return {d.weight * std::exp(expo), d.mu * shrink, d.nu * shrink};
}

Complex theta_fn(double kappa, double chi, Complex mu, Complex nu, double t)
{
    if (kappa == 0.0)
        return 0.0;
    const Complex r(kappa, chi);
    const double loss = -std::expm1(-2.0 * kappa * t);
    const Complex cross = (chi == 0.0) ? Complex(loss, 0.0) : (kappa / r) * (1.0 - std::exp(-2.0 * r * t));
    return -0.5 * (std::norm(nu) + std::norm(mu)) * loss + cross * std::conj(nu) * mu;
}

BlockEvolution evolve_block(Block block, const CoherentDyad& d, double kappa, double gamma, double chi,
                            double t, std::optional<CoherentDyad> ee_source)
{
    require_nonneg(kappa, "kappa");
    require_nonneg(gamma, "gamma");
    require_nonneg(t, "t");
    const Complex r(kappa, chi);
    const Complex rot = std::exp(-r * t);
    const Complex rot_c = std::exp(-std::conj(r) * t);

    switch (block) {
    case Block::ee:
        return {{d.weight * std::exp(-2.0 * gamma * t + theta_fn(kappa, 0.0, d.mu, d.nu, t)), d.mu * rot, d.nu * rot},
                std::nullopt};
    case Block::eg:
        return {{d.weight * std::exp(Complex(-gamma, -chi) * t + theta_fn(kappa, chi, d.mu, d.nu, t)), d.mu * rot,
                 d.nu * rot_c},
                std::nullopt};
    case Block::ge:
        return {{d.weight * std::exp(Complex(-gamma, chi) * t + theta_fn(kappa, -chi, d.mu, d.nu, t)), d.mu * rot_c,
                 d.nu * rot},
                std::nullopt};
    case Block::gg:
        break;
    }

    BlockEvolution out{{d.weight * std::exp(theta_fn(kappa, 0.0, d.mu, d.nu, t)), d.mu * rot_c, d.nu * rot_c},
                       std::nullopt};
    if (ee_source && gamma > 0.0 && t > 0.0) {
        const CoherentDyad src = *ee_source;
        auto integrand = [src, kappa, gamma, chi, t](double s) {
            const CoherentDyad at_s = evolve_block(Block::ee, src, kappa, gamma, chi, s).dyad;
            CoherentDyad fed = evolve_block(Block::gg, at_s, kappa, 0.0, chi, t - s).dyad;
            fed.weight *= 2.0 * gamma;
            return fed;
        };
        out.feeding = IntegralTerm{0.0, t, integrand};
    }
    return out;
}

BlockEvolution interact_block(Block block, const CoherentDyad& d, const DecoherenceParams& p, double t,
                              std::optional<CoherentDyad> ee_source)
{
    p.validate();
    return evolve_block(block, d, p.kappa, p.gammac, p.chi, t, ee_source);
}

Eigen::Matrix2cd prepare_atom_A(const DecoherenceParams& p, double t1, double t2)
{
    p.validate();
    require_nonneg(t1, "t1");
    require_nonneg(t2, "t2");
    const double g = p.gamma0;
    const Complex coh = (-0.5 * I + I * std::exp(-2.0 * g * t1)) * std::exp(-g * t2);
    Eigen::Matrix2cd rho;
    rho << 0.5 * std::exp(-2.0 * g * t2), coh,
           std::conj(coh), 1.0 - 0.5 * std::exp(-2.0 * g * t2);
    return rho;
}

namespace {

// Decay without dispersion during a flight of duration t.
void flight_stage(AtomFieldMixture& m, double kappa, double gamma, double t)
{
    auto evolve = [=](Block b) {
        return [=](const CoherentDyad& d) { return evolve_block(b, d, kappa, gamma, 0.0, t).dyad; };
    };

    AtomFieldMixture out;
    for (Block b : {Block::ee, Block::eg, Block::ge, Block::gg}) {
        for (const auto& d : m[b].dyads)
            out[b].dyads.push_back(evolve(b)(d));
        for (const auto& term : m[b].integrals)
            out[b].integrals.push_back(map_integral(term, evolve(b)));
    }

    // decay of the ee population into gg
    for (const auto& d : m[Block::ee].dyads) {
        if (gamma == 0.0 || t == 0.0)
            continue;
        if (d.mu == d.nu) {
            // diagonal dyads keep their labels' path independent of the emission time
            const double shrink = std::exp(-kappa * t);
            out[Block::gg].dyads.push_back({d.weight * -std::expm1(-2.0 * gamma * t), d.mu * shrink, d.nu * shrink});
        } else {
            out[Block::gg].integrals.push_back(*evolve_block(Block::gg, d, kappa, gamma, 0.0, t, d).feeding);
        }
    }
    if (!m[Block::ee].integrals.empty() && gamma > 0.0 && t > 0.0)
        throw ValidationError("flight stage does not support integral terms in the ee block");
    m = std::move(out);
}

}  // namespace

AtomFieldMixture pipeline_state(Complex alpha, Complex beta, const DecoherenceParams& p, const Timeline& tl)
{
    p.validate();
    tl.validate();
    if (!is_finite(alpha) || !is_finite(beta))
        throw ValidationError("alpha and beta must be finite");

    const Eigen::Matrix2cd rho_a = prepare_atom_A(p, tl.t1, tl.t2);
    const Complex field = I * alpha;

    // atom A interacts with the cavity for t3
    AtomFieldMixture m;
    const CoherentDyad ee0{rho_a(0, 0), field, field};
    m[Block::ee].dyads.push_back(interact_block(Block::ee, ee0, p, tl.t3).dyad);
    m[Block::eg].dyads.push_back(interact_block(Block::eg, {rho_a(0, 1), field, field}, p, tl.t3).dyad);
    m[Block::ge].dyads.push_back(interact_block(Block::ge, {rho_a(1, 0), field, field}, p, tl.t3).dyad);
    const BlockEvolution gg = interact_block(Block::gg, {rho_a(1, 1), field, field}, p, tl.t3, ee0);
    m[Block::gg].dyads.push_back(gg.dyad);
    if (gg.feeding)
        m[Block::gg].integrals.push_back(*gg.feeding);

    // atom A flies for t4 while the field decays
    flight_stage(m, p.kappa, p.gammap, tl.t4);

    // field displacement D^dagger(beta)
    const auto shift = [beta](const CoherentDyad& d) { return displace_dyad(d, -beta); };
    for (auto& block : m.blocks) {
        for (auto& d : block.dyads)
            d = shift(d);
        for (auto& term : block.integrals)
            term = map_integral(term, shift);
    }
    return m;
}

Eigen::Matrix2cd mho_b(Complex mu, Complex nu, const DecoherenceParams& p, const Timeline& tl,
                       const QuadratureOptions& opts)
{
    const double k = p.kappa, chi = p.chi, g0 = p.gamma0, gc = p.gammac;
    const double t1 = tl.t1, t2 = tl.t2, t3 = tl.t3;
    const double n2 = std::norm(mu) + std::norm(nu);
    const Complex cross = mu * std::conj(nu);
    const double e3 = std::exp(-2.0 * k * t3);
    const Complex ceg = -0.5 * I + I * std::exp(-2.0 * g0 * t1);

    Eigen::Matrix2cd out;
    out(0, 0) = 0.5 * std::exp(-2.0 * g0 * t2 - 2.0 * gc * t3 + theta_fn(k, 0.0, mu, nu, t3) - 0.5 * (n2 - 2.0 * cross) * e3);
    out(0, 1) = ceg * std::exp(-g0 * t2 + Complex(-gc, -chi) * t3 + theta_fn(k, chi, mu, nu, t3)
                               - 0.5 * (n2 - 2.0 * cross * std::polar(1.0, -2.0 * chi * t3)) * e3);
    out(1, 0) = std::conj(ceg) * std::exp(-g0 * t2 + Complex(-gc, chi) * t3 + theta_fn(k, -chi, mu, nu, t3)
                                          - 0.5 * (n2 - 2.0 * cross * std::polar(1.0, 2.0 * chi * t3)) * e3);
    Complex gg = (1.0 - 0.5 * std::exp(-2.0 * g0 * t2))
                 * std::exp(theta_fn(k, 0.0, mu, nu, t3) - 0.5 * (n2 - 2.0 * cross) * e3);
    if (gc > 0.0 && t3 > 0.0) {
        auto f = [&](double t) {
            return 0.5 * std::exp(-2.0 * g0 * t2 - 2.0 * gc * t + theta_fn(k, 0.0, mu, nu, t)
                                  - 0.5 * (n2 - 2.0 * cross) * std::exp(-2.0 * k * t));
        };
        gg += 2.0 * gc * integrate(f, 0.0, t3, opts).value;
    }
    out(1, 1) = gg;
    return out;
}

double final_correlation(double phi, Complex beta, const DecoherenceParams& p, const Timeline& tl, Complex alpha,
                         const QuadratureOptions& opts)
{
    p.validate();
    tl.validate();
    if (tl.t5 < tl.t3)
        throw ValidationError("t5 must be >= t3");
    const double k = p.kappa, chi = p.chi, g0 = p.gamma0, gc = p.gammac, gp = p.gammap;
    const double t1 = tl.t1, t2 = tl.t2, t3 = tl.t3, t4 = tl.t4, t5 = tl.t5;
    const Complex r(k, chi);
    const double d = std::expm1(-2.0 * g0 * t1);
    const double coh_b = std::exp(-g0 * t5 - 2.0 * g0 * t1);

    auto xi = [&](Complex mu, Complex nu) {
        const Eigen::Matrix2cd m = mho_b(mu, nu, p, tl, opts);
        return (m(0, 0) + m(1, 1)) * d + (m(0, 1) + m(1, 0)) * coh_b;
    };

    const Complex ia = I * alpha;
    const Complex l1 = ia * std::exp(-r * t3 - k * t4) - beta;
    const Complex l2 = ia * std::exp(-std::conj(r) * t3 - k * t4) - beta;
    const Complex Z = (-0.5 * I + I * std::exp(-2.0 * g0 * t1))
                      * std::exp(-g0 * (t2 + 2.0 * t1) + Complex(-gc, -chi) * t3 - gp * (t4 + t5)
                                 + theta_fn(k, chi, alpha, alpha, t3)
                                 + theta_fn(k, 0.0, alpha * std::exp(-r * t3), alpha * std::exp(-std::conj(r) * t3), t4)
                                 - 2.0 * I * std::exp(-k * (t4 + t3)) * std::sin(chi * t3) * std::imag(std::conj(alpha) * beta)
                                 + I * phi);

    Complex e = Z * xi(l1, l2) + std::conj(Z) * xi(l2, l1);
    if (d != 0.0) {
        e += 0.5 * std::exp(-2.0 * g0 * t2 - 2.0 * gc * t3 - 2.0 * gp * t4) * d
             * (1.0 - std::exp(-2.0 * gp * t3) + std::exp(-2.0 * gp * t5)) * xi(l1, l1);
        Complex bracket = (1.0 - 0.5 * std::exp(-2.0 * g0 * t2)) * xi(l2, l2);
        if (gc > 0.0 && t3 > 0.0) {
            auto f = [&](double t) {
                const Complex lam = ia * std::exp(-r * t - k * t4) - beta;
                return 0.5 * std::exp(-2.0 * g0 * t2 - 2.0 * gc * t) * xi(lam, lam);
            };
            bracket += 2.0 * gc * integrate(f, 0.0, t3, opts).value;
        }
        if (gp > 0.0 && t4 > 0.0) {
            auto f = [&](double t) {
                const Complex lam = ia * std::exp(-r * t3 - k * t) - beta;
                return 0.5 * std::exp(-2.0 * g0 * t2 - 2.0 * gc * t3 - 2.0 * gp * t) * xi(lam, lam);
            };
            bracket += 2.0 * gp * integrate(f, 0.0, t4, opts).value;
        }
        e += d * bracket;
    }
    return e.real();
}

double staged_correlation(const AtomFieldMixture& mixture, double phi, const DecoherenceParams& p, const Timeline& tl,
                          const QuadratureOptions& opts)
{
    p.validate();
    tl.validate();
    if (tl.t5 < tl.t3)
        throw ValidationError("t5 must be >= t3");
    const double e1 = std::exp(-2.0 * p.gamma0 * tl.t1);
    const double coh_b = e1 * std::exp(-p.gamma0 * tl.t2);

    // Tr[X_B(sigma) Gamma] for the probe atom state grown from one field dyad
    auto probe = [&](const CoherentDyad& dy) {
        const Eigen::Matrix2cd m = mho_b(dy.mu, dy.nu, p, tl, opts);
        return dy.weight * ((e1 - 1.0) * (m(0, 0) + m(1, 1)) + coh_b * (m(0, 1) + m(1, 0)));
    };
    auto block_value = [&](Block b) {
        Complex v = 0.0;
        for (const auto& d : mixture[b].dyads)
            v += probe(d);
        for (const auto& term : mixture[b].integrals) {
            auto f = term.integrand;
            v += integrate([&](double t) { return probe(f(t)); }, term.lower, term.upper, opts).value;
        }
        return v;
    };

    const double coh_a = e1 * std::exp(-p.gammap * tl.t5);
    const Complex e = (e1 - 1.0) * (block_value(Block::ee) + block_value(Block::gg))
                      + coh_a * (std::polar(1.0, phi) * block_value(Block::eg) + std::polar(1.0, -phi) * block_value(Block::ge));
    return e.real();
}

double solve_beta_decoh(double alpha_mag, double kappa, double t3, double t4)
{
    require_nonneg(alpha_mag, "alpha");
    require_nonneg(kappa, "kappa");
    require_nonneg(t3, "t3");
    require_nonneg(t4, "t4");
    return parity_optimal_beta(alpha_mag * std::exp(-kappa * (t4 + t3)));
}

double decohered_bell_default_settings(double alpha_mag, const DecoherenceParams& p, const Timeline& tl,
                                       const QuadratureOptions& opts)
{
    const double bm = solve_beta_decoh(alpha_mag, p.kappa, tl.t3, tl.t4);
    const Complex b(0.0, bm);
    const Complex alpha(alpha_mag, 0.0);
    auto E = [&](double phi, Complex beta) { return final_correlation(phi, beta, p, tl, alpha, opts); };
    return std::abs(E(0.0, b) + E(kPi / 2.0, b) + E(0.0, -b) - E(kPi / 2.0, -b));
}

Eigen::MatrixXcd dyad_to_fock(const CoherentDyad& d, int N)
{
    return d.weight * coherent_fock(d.mu, N) * coherent_fock(d.nu, N).adjoint();
}

Eigen::MatrixXcd integral_to_fock(const IntegralTerm& term, int N)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (const auto& node : gauss_legendre_nodes(term.lower, term.upper))
        out += node.w * dyad_to_fock(term.integrand(node.t), N);
    return out;
}

}  // namespace bellcav
