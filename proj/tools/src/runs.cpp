#include "bellcav_app/runs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "bellcav/correlators.hpp"
#include "bellcav/fockspace.hpp"
#include "bellcav/roots.hpp"

namespace bellcav::app {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex m;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!first)
                    first = std::current_exception();
                next = n;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (first)
        std::rethrow_exception(first);
}

std::vector<std::string> argmax_names(Family family)
{
    switch (family) {
    case Family::parity_real:
        return {"theta", "theta_p", "re_beta", "im_beta", "re_beta_p", "im_beta_p"};
    case Family::decohered:
        return {"phi", "phi_p", "re_beta", "im_beta", "re_beta_p", "im_beta_p"};
    default:
        return {"theta", "phi", "theta_p", "phi_p", "re_beta", "im_beta", "re_beta_p", "im_beta_p"};
    }
}

namespace {

ScanTable scan_optimizer_family(const RunConfig& cfg)
{
    ScanTable t;
    t.kind = "scan";
    t.family = to_string(cfg.family);
    t.seed = cfg.optimizer.seed;
    t.argmax_names = argmax_names(cfg.family);
    const bool sweep_eta = cfg.family == Family::onoff;
    t.var_names = sweep_eta ? std::vector<std::string>{"eta", "alpha"} : std::vector<std::string>{"alpha"};
    const std::vector<double> etas = sweep_eta ? cfg.eta : std::vector<double>{1.0};

    std::optional<std::pair<double, double>> monotone;
    if (cfg.family == Family::parity || cfg.family == Family::parity_real)
        monotone = std::make_pair(0.0, std::numeric_limits<double>::infinity());

    OptimizerConfig inner = cfg.optimizer;
    if (etas.size() > 1)
        inner.threads = 1;

    std::vector<std::vector<ScanPoint>> rows(etas.size());
    parallel_for(etas.size(), etas.size() > 1 ? cfg.optimizer.threads : 1, [&](std::size_t k) {
        FamilyParams fixed;
        fixed.eta = etas[k];
        OptimizerConfig oc = inner;
        oc.seed = cfg.optimizer.seed + 0xD1B54A32D192ED03ULL * k;
        rows[k] = scan_alpha(cfg.family, fixed, cfg.alpha, oc, monotone);
    });

    for (std::size_t k = 0; k < etas.size(); ++k) {
        for (const auto& pt : rows[k]) {
            ScanRecord r;
            if (sweep_eta)
                r.vars.push_back(etas[k]);
            r.vars.push_back(pt.alpha);
            r.bell = pt.result.best_value;
            r.argmax = pt.result.argmax;
            r.restarts_used = pt.result.restarts_used;
            r.converged = pt.result.converged;
            r.dropout = pt.dropout;
            t.records.push_back(std::move(r));
        }
    }
    return t;
}

std::vector<double> default_decohered_settings(double alpha, const DecoherenceParams& p, const Timeline& tl)
{
    const double bm = solve_beta_decoh(alpha, p.kappa, tl.t3, tl.t4);
    return {0.0, kPi / 2.0, 0.0, bm, 0.0, -bm};
}

ScanRecord decohered_record(std::vector<double> vars, double alpha, const DecoherenceParams& p, const Timeline& tl)
{
    ScanRecord r;
    r.vars = std::move(vars);
    double err = 0.0;
    QuadratureOptions opts;
    opts.max_error = &err;
    try {
        r.bell = decohered_bell_default_settings(alpha, p, tl, opts);
        r.argmax = default_decohered_settings(alpha, p, tl);
    } catch (const NumericalError& e) {
        r.bell = std::numeric_limits<double>::quiet_NaN();
        r.converged = false;
        err = std::max(err, e.error_estimate());
    }
    r.quadrature_error = err;
    return r;
}

ScanTable scan_decohered(const RunConfig& cfg)
{
    ScanTable t;
    t.kind = "scan";
    t.family = to_string(cfg.family);
    t.seed = cfg.optimizer.seed;
    t.argmax_names = argmax_names(cfg.family);
    t.var_names = {"separation_m", "alpha"};

    std::vector<Timeline> tls;
    for (double l : cfg.separation_m)
        tls.push_back(timeline_for_separation(cfg.timeline, l));

    const std::size_t na = cfg.alpha.size();
    t.records.resize(tls.size() * na);
    parallel_for(t.records.size(), cfg.optimizer.threads, [&](std::size_t i) {
        const std::size_t li = i / na;
        const std::size_t ai = i % na;
        t.records[i] = decohered_record({cfg.separation_m[li], cfg.alpha[ai]}, cfg.alpha[ai], cfg.rates, tls[li]);
    });

    nlohmann::json best = nlohmann::json::array();
    for (std::size_t li = 0; li < tls.size(); ++li) {
        double b = -1.0, a = 0.0;
        for (std::size_t ai = 0; ai < na; ++ai) {
            const auto& r = t.records[li * na + ai];
            if (std::isfinite(r.bell) && r.bell > b) {
                b = r.bell;
                a = cfg.alpha[ai];
            }
        }
        best.push_back({{"separation_m", cfg.separation_m[li]}, {"alpha", a}, {"bell", b}});
    }
    t.summary["best_over_alpha"] = best;
    return t;
}

}  // namespace

ScanTable run_scan(const RunConfig& cfg)
{
    cfg.validate();
    return cfg.family == Family::decohered ? scan_decohered(cfg) : scan_optimizer_family(cfg);
}

DecoherenceParams contour_rates(const RunConfig& cfg, double tc_s)
{
    if (!(tc_s > 0.0))
        throw ValidationError("storage time must be > 0");
    DecoherenceParams p = cfg.rates;
    p.kappa = 1.0 / (2.0 * tc_s);
    p.gammap = std::isinf(cfg.contour.tatom_s) ? 0.0 : 1.0 / (2.0 * cfg.contour.tatom_s);
    return p;
}

Timeline contour_timeline(const RunConfig& cfg)
{
    if (cfg.contour.t4_s >= 0.0) {
        Timeline tl = cfg.timeline;
        tl.t4 = cfg.contour.t4_s;
        return tl;
    }
    return timeline_for_separation(cfg.timeline, cfg.contour.separation_m);
}

AlphaOptimum best_alpha(const DecoherenceParams& p, const Timeline& tl, const std::vector<double>& grid)
{
    if (grid.empty())
        throw ValidationError("alpha grid is empty");
    auto bell = [&](double a) { return decohered_bell_default_settings(a, p, tl); };
    std::size_t best = 0;
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = bell(grid[i]);
        if (values[i] > values[best])
            best = i;
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    AlphaOptimum out{grid[best], values[best]};
    if (hi > lo) {
        std::uintmax_t iters = 100;
        const auto r = boost::math::tools::brent_find_minima([&](double a) { return -bell(a); }, lo, hi, 30, iters);
        if (-r.second > out.bell)
            out = {r.first, -r.second};
    }
    return out;
}

Threshold bell_threshold(const RunConfig& cfg)
{
    const Timeline tl = contour_timeline(cfg);
    const auto tcs = linear_grid(cfg.contour.tc_min_s, cfg.contour.tc_max_s, cfg.contour.tc_count);
    const auto alphas = linear_grid(cfg.contour.alpha_min, cfg.contour.alpha_max, cfg.contour.alpha_count);
    auto excess = [&](double tc) { return best_alpha(contour_rates(cfg, tc), tl, alphas).bell - 2.0; };

    Threshold out;
    if (excess(tcs[0]) >= 0.0)
        return out;
    for (std::size_t j = 1; j < tcs.size(); ++j) {
        const double cur = excess(tcs[j]);
        if (cur >= 0.0) {
            out.found = true;
            out.tc_s = bisect_root(excess, tcs[j - 1], tcs[j], 1e-3);
            out.alpha = best_alpha(contour_rates(cfg, out.tc_s), tl, alphas).alpha;
            return out;
        }
    }
    return out;
}

ScanTable run_contour(const RunConfig& cfg)
{
    cfg.validate();
    ScanTable t;
    t.kind = "contour";
    t.family = to_string(Family::decohered);
    t.seed = cfg.optimizer.seed;
    t.argmax_names = argmax_names(Family::decohered);
    t.var_names = {"tc_s", "alpha"};

    const Timeline tl = contour_timeline(cfg);
    const auto tcs = linear_grid(cfg.contour.tc_min_s, cfg.contour.tc_max_s, cfg.contour.tc_count);
    const auto alphas = linear_grid(cfg.contour.alpha_min, cfg.contour.alpha_max, cfg.contour.alpha_count);
    t.records.resize(tcs.size() * alphas.size());
    parallel_for(t.records.size(), cfg.optimizer.threads, [&](std::size_t i) {
        const double tc = tcs[i / alphas.size()];
        const double a = alphas[i % alphas.size()];
        t.records[i] = decohered_record({tc, a}, a, contour_rates(cfg, tc), tl);
    });

    const Threshold th = bell_threshold(cfg);
    nlohmann::json s;
    s["tatom_s"] = std::isinf(cfg.contour.tatom_s) ? nlohmann::json("inf") : nlohmann::json(cfg.contour.tatom_s);
    s["t4_s"] = tl.t4;
    s["t5_s"] = tl.t5;
    s["threshold_found"] = th.found;
    s["threshold_tc_s"] = th.found ? nlohmann::json(th.tc_s) : nlohmann::json(nullptr);
    s["threshold_alpha"] = th.found ? nlohmann::json(th.alpha) : nlohmann::json(nullptr);
    t.summary = s;
    return t;
}

nlohmann::json LocalityReport::to_json() const
{
    auto sol = [](const LocalitySolution& s) {
        return nlohmann::json{{"t4_s", s.t4}, {"t5_s", s.t5}, {"l_m", s.l}, {"slack_m", {s.residuals[0], s.residuals[1]}}};
    };
    return {{"schema_version", kSchemaVersion},
            {"with_t6", sol(with_t6)},
            {"without_t6", sol(without_t6)},
            {"with_t6_light_cones_hold", with_t6_holds},
            {"without_t6_light_cones_hold", without_t6_holds},
            {"simple_check", simple_check},
            {"separation_conventions_differ", conventions_differ},
            {"waveguide_diameter_m", waveguide_diameter_m}};
}

std::string LocalityReport::to_text() const
{
    std::ostringstream os;
    os.precision(6);
    os << "minimal flight times (readout window t6 included)\n"
       << "  t4 = " << with_t6.t4 << " s\n"
       << "  t5 = " << with_t6.t5 * 1e6 << " us\n"
       << "  l  = " << with_t6.l / 1e3 << " km\n"
       << "  light cones: " << (with_t6_holds ? "pass" : "FAIL") << " (slack " << with_t6.residuals[0] << ", "
       << with_t6.residuals[1] << " m)\n"
       << "minimal flight times (t6 dropped)\n"
       << "  t4 = " << without_t6.t4 << " s\n"
       << "  t5 = " << without_t6.t5 * 1e6 << " us\n"
       << "  l  = " << without_t6.l / 1e3 << " km\n"
       << "  light cones: " << (without_t6_holds ? "pass" : "FAIL") << "\n";
    if (conventions_differ)
        os << "note: the two t6 conventions give different separations\n";
    os << "simultaneous readout check at l (t6 windows): " << (simple_check ? "pass" : "FAIL") << "\n"
       << "max waveguide diameter = " << waveguide_diameter_m * 1e3 << " mm\n";
    return os.str();
}

LocalityReport run_locality(const RunConfig& cfg)
{
    cfg.validate();
    LocalityInputs in;
    in.tl = cfg.timeline;
    in.c = cfg.light_speed_m_per_s;
    LocalityReport r;
    r.with_t6 = min_travel_times(in, true);
    r.without_t6 = min_travel_times(in, false);
    const double tol = 1e-6 * in.c * 1e-6;
    auto holds = [tol](const LocalitySolution& s) { return s.residuals[0] >= -tol && s.residuals[1] >= -tol; };
    r.with_t6_holds = holds(r.with_t6);
    r.without_t6_holds = holds(r.without_t6);
    r.simple_check = check_locality_simple(r.with_t6.l, 0.0, in.tl.t6, in.tl.t6, in.c);
    r.conventions_differ = std::abs(r.with_t6.l - r.without_t6.l) > 1e-3 * r.without_t6.l;
    if (cfg.omega0_rad_per_s > 0.0)
        r.waveguide_diameter_m = max_waveguide_diameter(cfg.omega0_rad_per_s, in.c);
    return r;
}

namespace {

// Blocks of an atom-field density matrix on layout {2, N}.
struct Blocks {
    Eigen::MatrixXcd b[2][2];
};

Blocks split(const DensityMatrix& rho)
{
    const int N = rho.field_dim();
    Blocks out;
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            out.b[a][c] = rho.matrix().block(a * N, c * N, N, N);
    return out;
}

// Tr[rho^{ab} O] for all four blocks
Eigen::Matrix2cd field_traces(const Blocks& rho, const Eigen::MatrixXcd& obs)
{
    Eigen::Matrix2cd t;
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            t(a, c) = (rho.b[a][c].transpose().array() * obs.array()).sum();
    return t;
}

// Re sum_ab G_ba t_ab
double contract(const AtomOperator& g, const Eigen::Matrix2cd& t)
{
    Complex v = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            v += g(c, a) * t(a, c);
    return v.real();
}

Eigen::MatrixXcd probe_field_observable(double chi_t, int N)
{
    const Eigen::Vector2cd probe = atomic_displacement(Complex(0.0, -kPi / 4.0)).col(0);
    const Eigen::MatrixXcd u = dispersive_propagator(1.0, chi_t, N);
    Eigen::Matrix2cd sx;
    sx << 0.0, 1.0, 1.0, 0.0;
    const Eigen::MatrixXcd heis = u.adjoint() * kron(sx, Eigen::MatrixXcd::Identity(N, N)) * u;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            out += std::conj(probe(a)) * probe(c) * heis.block(a * N, c * N, N, N);
    return out;
}

}  // namespace

std::vector<OracleCheck> run_oracle_check(const RunConfig& cfg, int points_per_axis)
{
    if (points_per_axis < 2)
        throw ValidationError("points_per_axis must be >= 2");
    const int n = points_per_axis;
    const auto mags = linear_grid(0.0, 1.5, n);
    const auto thetas = linear_grid(0.0, kPi, n);
    std::vector<double> phases;
    for (int i = 0; i < n; ++i)
        phases.push_back(2.0 * kPi * i / n);
    const auto etas = linear_grid(0.2, 1.0, n);
    const int N = choose_truncation(3.0);
    const double alpha_phase = 0.3;

    std::vector<OracleCheck> out;

    // on/off and parity against the truncated-Fock state
    OracleCheck onoff{"onoff_vs_fock", 0.0, 1e-7, true};
    OracleCheck parity{"parity_vs_fock", 0.0, 1e-7, true};
    for (double am : mags) {
        const Complex alpha = std::polar(am, alpha_phase);
        const DensityMatrix pure = build_entangled_state(alpha, N, PhaseConvention::main_text);
        const Blocks pure_blocks = split(pure);
        std::vector<Blocks> lossy;
        for (double eta : etas)
            lossy.push_back(split(apply_detector_loss(pure, eta)));
        for (double bm : mags) {
            for (double bp : phases) {
                const Complex beta = std::polar(bm, bp);
                const auto t_par = field_traces(pure_blocks, measurement_projectors(FieldMeasurement::parity, beta, N));
                const Eigen::MatrixXcd o_on = measurement_projectors(FieldMeasurement::onoff, beta, N);
                std::vector<Eigen::Matrix2cd> t_on;
                for (const auto& l : lossy)
                    t_on.push_back(field_traces(l, o_on));
                for (double th : thetas) {
                    for (double ph : phases) {
                        const double ref = contract(displaced_gamma(zeta_from_angles(th, ph)), t_par);
                        parity.max_residual = std::max(parity.max_residual, std::abs(ref - corr_parity(alpha, th, ph, beta)));
                        const AtomOperator g_on = displaced_gamma(zeta_from_angles(onoff_rotation_angle(th), ph));
                        for (std::size_t k = 0; k < etas.size(); ++k) {
                            const double r = contract(g_on, t_on[k]);
                            onoff.max_residual
                                = std::max(onoff.max_residual, std::abs(r - corr_onoff(alpha, th, ph, beta, etas[k])));
                        }
                    }
                }
            }
        }
    }
    out.push_back(onoff);
    out.push_back(parity);

    // indirect readout at chi t = pi/2 against parity, random settings
    OracleCheck random_parity{"indirect_half_pi_vs_parity_random", 0.0, 1e-12, true};
    std::mt19937_64 rng(cfg.optimizer.seed);
    auto u = [&rng] { return uniform01(rng()); };
    for (int i = 0; i < 10000; ++i) {
        const Complex alpha = std::polar(1.5 * u(), 2.0 * kPi * u());
        const Complex beta = std::polar(1.5 * u(), 2.0 * kPi * u());
        const double th = kPi * u();
        const double ph = 2.0 * kPi * u();
        random_parity.max_residual = std::max(
            random_parity.max_residual,
            std::abs(corr_indirect(alpha, th, ph, beta, kPi / 2.0) - corr_parity(alpha, th, ph, beta)));
    }
    out.push_back(random_parity);

    // indirect closed form against the probe-atom chain
    for (double chi_t : {kPi / 2.0, 0.0, 0.7, kPi}) {
        std::ostringstream name;
        name.precision(6);
        name << "indirect_vs_probe_chain_chi_t_" << chi_t;
        OracleCheck c{name.str(), 0.0, chi_t == kPi / 2.0 ? 1e-7 : 0.0, chi_t == kPi / 2.0};
        const Eigen::MatrixXcd f = probe_field_observable(chi_t, N);
        for (double am : mags) {
            const Complex alpha = std::polar(am, alpha_phase);
            const Blocks rho = split(build_entangled_state(alpha, N, PhaseConvention::main_text));
            for (double bm : mags) {
                for (double bp : phases) {
                    const Complex beta = std::polar(bm, bp);
                    const FockOperator d = displacement_matrix(beta, N);
                    const auto t = field_traces(rho, d * f * d.adjoint());
                    for (double th : thetas)
                        for (double ph : phases) {
                            const double ref = contract(displaced_gamma(zeta_from_angles(th, ph)), t);
                            c.max_residual
                                = std::max(c.max_residual, std::abs(ref - corr_indirect(alpha, th, ph, beta, chi_t)));
                        }
                }
            }
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace bellcav::app
