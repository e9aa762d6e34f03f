#include "bellcav/bellopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "bellcav/correlators.hpp"
#include "bellcav/roots.hpp"

namespace bellcav {

Family family_from_string(const std::string& name)
{
    if (name == "onoff")
        return Family::onoff;
    if (name == "parity")
        return Family::parity;
    if (name == "parity_real")
        return Family::parity_real;
    if (name == "indirect")
        return Family::indirect;
    if (name == "decohered")
        return Family::decohered;
    throw ValidationError("unknown correlation family '" + name + "'");
}

std::string to_string(Family f)
{
    switch (f) {
    case Family::onoff: return "onoff";
    case Family::parity: return "parity";
    case Family::parity_real: return "parity_real";
    case Family::indirect: return "indirect";
    case Family::decohered: return "decohered";
    }
    return "unknown";
}

int family_dims(Family f)
{
    switch (f) {
    case Family::onoff:
    case Family::parity:
    case Family::indirect: return 8;
    case Family::parity_real:
    case Family::decohered: return 6;
    }
    return 0;
}

double uniform01(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace {

double wrap(double x, double period)
{
    double r = std::fmod(x, period);
    if (r < 0.0)
        r += period;
    if (r >= period)
        r = 0.0;
    return r;
}

// (theta, phi) ~ (-theta, phi + pi); theta has period `period`.
void fold_angles(double& theta, double& phi, double period)
{
    theta = wrap(theta, period);
    if (theta > 0.5 * period) {
        theta = period - theta;
        phi += kPi;
    }
    phi = wrap(phi, 2.0 * kPi);
}

template <class E>
double chsh8(const std::vector<double>& x, E&& corr)
{
    const Complex b(x[4], x[5]);
    const Complex bp(x[6], x[7]);
    return chsh_combine(corr(x[0], x[1], b), corr(x[2], x[3], b), corr(x[0], x[1], bp), corr(x[2], x[3], bp));
}

}  // namespace

BellProblem make_problem(Family family, const FamilyParams& fixed)
{
    BellProblem p;
    p.dims = family_dims(family);
    const Complex alpha = fixed.alpha;
    const double box = std::max(3.0, 3.0 * std::abs(alpha));
    const std::pair<double, double> theta_box{0.0, kPi};
    const std::pair<double, double> phi_box{0.0, 2.0 * kPi};
    const std::pair<double, double> field_box{-box, box};

    switch (family) {
    case Family::onoff: {
        if (!(fixed.eta >= 0.0 && fixed.eta <= 1.0))
            throw ValidationError("eta must lie in [0, 1]");
        const double eta = fixed.eta;
        p.objective = [alpha, eta](const std::vector<double>& x) {
            return chsh8(x, [&](double th, double ph, Complex b) { return corr_onoff(alpha, th, ph, b, eta); });
        };
        p.canonicalize = [](std::vector<double>& x) {
            fold_angles(x[0], x[1], 4.0 * kPi);
            fold_angles(x[2], x[3], 4.0 * kPi);
        };
        p.start_box = {theta_box, phi_box, theta_box, phi_box, field_box, field_box, field_box, field_box};
        break;
    }
    case Family::parity:
    case Family::indirect: {
        const double chi_t = fixed.chi_t;
        if (family == Family::parity) {
            p.objective = [alpha](const std::vector<double>& x) {
                return chsh8(x, [&](double th, double ph, Complex b) { return corr_parity(alpha, th, ph, b); });
            };
        } else {
            p.objective = [alpha, chi_t](const std::vector<double>& x) {
                return chsh8(x, [&](double th, double ph, Complex b) { return corr_indirect(alpha, th, ph, b, chi_t); });
            };
        }
        p.canonicalize = [](std::vector<double>& x) {
            fold_angles(x[0], x[1], 2.0 * kPi);
            fold_angles(x[2], x[3], 2.0 * kPi);
        };
        p.start_box = {theta_box, phi_box, theta_box, phi_box, field_box, field_box, field_box, field_box};
        break;
    }
    case Family::parity_real: {
        p.objective = [alpha](const std::vector<double>& x) {
            const Complex b(x[2], x[3]);
            const Complex bp(x[4], x[5]);
            auto E = [&](double th, Complex bb) { return corr_parity(alpha, th, 0.0, bb); };
            return chsh_combine(E(x[0], b), E(x[1], b), E(x[0], bp), E(x[1], bp));
        };
        p.canonicalize = [](std::vector<double>& x) {
            for (int i = 0; i < 2; ++i) {
                x[i] = wrap(x[i] + kPi, 2.0 * kPi) - kPi;
            }
        };
        p.start_box = {{-kPi, kPi}, {-kPi, kPi}, field_box, field_box, field_box, field_box};
        break;
    }
    case Family::decohered: {
        const DecoherenceParams dp = fixed.decoherence;
        const Timeline tl = fixed.timeline;
        dp.validate();
        tl.validate();
        p.objective = [alpha, dp, tl](const std::vector<double>& x) {
            const Complex b(x[2], x[3]);
            const Complex bp(x[4], x[5]);
            auto E = [&](double ph, Complex bb) { return final_correlation(ph, bb, dp, tl, alpha); };
            return chsh_combine(E(x[0], b), E(x[1], b), E(x[0], bp), E(x[1], bp));
        };
        p.canonicalize = [](std::vector<double>& x) {
            x[0] = wrap(x[0], 2.0 * kPi);
            x[1] = wrap(x[1], 2.0 * kPi);
        };
        p.start_box = {phi_box, phi_box, field_box, field_box, field_box, field_box};
        break;
    }
    }
    return p;
}

namespace {

struct LocalResult {
    double value;
    std::vector<double> x;
    bool converged;
};

LocalResult local_ascent(const BellProblem& prob, std::vector<double> x0, const OptimizerConfig& cfg)
{
    const int n = prob.dims;
    const double h = cfg.fd_step;
    auto f = [&](const Eigen::VectorXd& v) {
        return prob.objective(std::vector<double>(v.data(), v.data() + n));
    };
    auto grad = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd g(n);
        Eigen::VectorXd w = v;
        for (int i = 0; i < n; ++i) {
            const double xi = w(i);
            w(i) = xi + h;
            const double fp = f(w);
            w(i) = xi - h;
            const double fm = f(w);
            w(i) = xi;
            g(i) = (fp - fm) / (2.0 * h);
        }
        return g;
    };

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    double fx = f(x);
    Eigen::VectorXd g = grad(x);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool converged = false;
    bool fresh_h = true;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        if (!std::isfinite(fx) || !g.allFinite())
            break;
        if (g.lpNorm<Eigen::Infinity>() < cfg.tol * (1.0 + std::abs(fx))) {
            converged = true;
            break;
        }
        Eigen::VectorXd d = H * g;
        double slope = g.dot(d);
        if (!(slope > 0.0)) {
            H.setIdentity();
            fresh_h = true;
            d = g;
            slope = g.dot(d);
        }
        const double dmax = d.lpNorm<Eigen::Infinity>();
        double a = dmax > 1.0 ? 1.0 / dmax : 1.0;
        const double a0 = a;
        Eigen::VectorXd xn;
        double fn = fx;
        bool accepted = false;
        while (a > 1e-14) {
            xn = x + a * d;
            fn = f(xn);
            if (fn >= fx + 1e-4 * a * slope || (a == a0 && fn >= fx && !fresh_h)) {
                accepted = true;
                break;
            }
            a *= 0.5;
        }
        if (!accepted) {
            if (fresh_h)
                break;
            H.setIdentity();
            fresh_h = true;
            continue;
        }
        const Eigen::VectorXd gn = grad(xn);
        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd y = -(gn - g);
        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
            fresh_h = false;
        }
        x = xn;
        fx = fn;
        g = gn;
    }
    return {fx, std::vector<double>(x.data(), x.data() + n), converged};
}

bool better(const LocalResult& a, const LocalResult& b)
{
    if (!std::isfinite(b.value))
        return std::isfinite(a.value);
    if (a.value != b.value)
        return a.value > b.value;
    return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
}

}  // namespace

OptimizationResult maximize_bell(const BellProblem& problem, const OptimizerConfig& config,
                                 const std::vector<std::vector<double>>& warm_starts)
{
    if (config.restarts < 0)
        throw ValidationError("restarts must be >= 0");
    if (!(config.tol > 0.0))
        throw ValidationError("tol must be > 0");
    for (const auto& w : warm_starts)
        if (static_cast<int>(w.size()) != problem.dims)
            throw ValidationError("warm start dimension mismatch");

    std::vector<std::vector<double>> starts = warm_starts;
    std::mt19937_64 gen(config.seed);
    for (int r = 0; r < config.restarts; ++r) {
        std::vector<double> x(problem.dims);
        for (int i = 0; i < problem.dims; ++i) {
            const auto [lo, hi] = problem.start_box[i];
            x[i] = lo + (hi - lo) * uniform01(gen());
        }
        starts.push_back(std::move(x));
    }
    if (starts.empty())
        throw ValidationError("no optimization starts");

    std::vector<LocalResult> results(starts.size());
    unsigned nthreads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(starts.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < starts.size(); i = next++)
            results[i] = local_ascent(problem, starts[i], config);
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    for (auto& r : results) {
        problem.canonicalize(r.x);
        r.value = problem.objective(r.x);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (better(results[i], results[best]))
            best = i;

    OptimizationResult out;
    out.best_value = results[best].value;
    out.argmax = results[best].x;
    out.restarts_used = static_cast<int>(starts.size());
    out.converged = results[best].converged;
    return out;
}

OptimizationResult maximize_bell(Family family, const FamilyParams& fixed, int dims, const OptimizerConfig& config)
{
    if (dims != family_dims(family))
        throw ValidationError("dims does not match the family's setting count");
    return maximize_bell(make_problem(family, fixed), config);
}

double solve_beta_onoff(double alpha_mag, double eta)
{
    if (!(alpha_mag >= 0.0) || !std::isfinite(alpha_mag))
        throw ValidationError("alpha magnitude must be finite and >= 0");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ValidationError("eta must lie in [0, 1]");
    if (alpha_mag == 0.0)
        return 0.0;
    const double a = alpha_mag;
    const double se = std::sqrt(eta);
    auto f = [a, se, eta](double b) {
        return std::exp(-2.0 * a * b * se) * (b + a * se) - std::exp(2.0 * a * b * se) * (b - a * se)
               - 2.0 * b * std::exp(2.0 * (eta - 1.0) * a * a);
    };
    return first_root_from_zero(f, 1e-3, 5.0);
}

double solve_beta_parity(double alpha_mag)
{
    return parity_optimal_beta(alpha_mag);
}

double onoff_bell_analytic_settings(double alpha_mag, double eta)
{
    const double b = solve_beta_onoff(alpha_mag, eta);
    const Complex alpha(alpha_mag, 0.0);
    auto E = [&](double th, double ph, Complex beta) { return corr_onoff(alpha, th, ph, beta, eta); };
    return chsh_combine(E(kPi, kPi, b), E(0.0, 0.0, b), E(kPi, kPi, -b), E(0.0, 0.0, -b));
}

double parity_bell_analytic_settings(double alpha_mag)
{
    const Complex b(0.0, solve_beta_parity(alpha_mag));
    const Complex alpha(alpha_mag, 0.0);
    auto E = [&](double ph, Complex beta) { return corr_parity(alpha, kPi / 2.0, ph, beta); };
    return chsh_combine(E(0.0, b), E(kPi / 2.0, b), E(0.0, -b), E(kPi / 2.0, -b));
}

std::vector<ScanPoint> scan_alpha(Family family, FamilyParams fixed, const std::vector<double>& alpha_grid,
                                  const OptimizerConfig& config, std::optional<std::pair<double, double>> monotone_region)
{
    if (alpha_grid.empty())
        throw ValidationError("alpha grid is empty");
    std::vector<ScanPoint> out;
    std::vector<std::vector<double>> warm;
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        fixed.alpha = Complex(alpha_grid[i], 0.0);
        OptimizerConfig cfg = config;
        cfg.seed = config.seed + 0x9E3779B97F4A7C15ULL * (i + 1);
        ScanPoint pt;
        pt.alpha = alpha_grid[i];
        try {
            pt.result = maximize_bell(make_problem(family, fixed), cfg, warm);
        } catch (const NumericalError&) {
            pt.result.best_value = std::numeric_limits<double>::quiet_NaN();
            pt.result.converged = false;
            out.push_back(std::move(pt));
            continue;
        }
        if (i > 0 && monotone_region && std::isfinite(out.back().result.best_value)) {
            const auto [lo, hi] = *monotone_region;
            const bool inside = alpha_grid[i - 1] >= lo && alpha_grid[i] <= hi;
            pt.dropout = inside && pt.result.best_value < out.back().result.best_value - 0.05;
        }
        warm = {pt.result.argmax};
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace bellcav
