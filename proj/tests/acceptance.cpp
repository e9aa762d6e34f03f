// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bellcav/correlators.hpp"
#include "bellcav/decoherence.hpp"
#include "bellcav/fockspace.hpp"
#include "bellcav_app/config.hpp"
#include "bellcav_app/output.hpp"
#include "bellcav_app/runs.hpp"

using namespace bellcav;
using namespace bellcav::app;

namespace {

const std::string kConfigDir = BELLCAV_CONFIG_DIR;
const double kCirelson = 2.0 * std::sqrt(2.0);
int failures = 0;

struct Line {
    std::string id;
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what;
        if (!ok) {
            pass = false;
            detail += " [x]";
        }
    }
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class F>
void run(const std::string& id, F&& body, bool counted = true)
{
    Line line;
    line.id = id;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(line);
    } catch (const std::exception& e) {
        line.check(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!line.pass && counted)
        ++failures;
    std::printf("criterion %-5s %s  (%.1f s)  %s\n", id.c_str(), line.pass ? "PASS" : "FAIL", secs, line.detail.c_str());
    std::fflush(stdout);
}

OptimizerConfig optimizer(std::uint64_t seed)
{
    OptimizerConfig c;
    c.seed = seed;
    return c;
}

std::vector<double> grid(double lo, double hi, double step)
{
    return linear_grid(lo, hi, static_cast<int>(std::lround((hi - lo) / step)) + 1);
}

struct Peak {
    double alpha = 0.0;
    double bell = -1.0;
};

Peak onoff_peak(double eta, const std::vector<double>& alphas, std::uint64_t seed)
{
    FamilyParams fp;
    fp.eta = eta;
    Peak p;
    for (const auto& pt : scan_alpha(Family::onoff, fp, alphas, optimizer(seed)))
        if (pt.result.best_value > p.bell)
            p = {pt.alpha, pt.result.best_value};
    return p;
}

void criterion1(Line& line)
{
    for (const OracleCheck& c : run_oracle_check(default_config(), 5)) {
        if (!c.asserted)
            continue;
        line.check(c.passed(), c.name + " " + fmt("%.2e", c.max_residual) + " <= " + fmt("%.0e", c.tolerance));
    }
}

void criterion2(Line& line)
{
    const struct {
        double eta, bell, alpha;
    } targets[] = {{1.0, 2.61, 0.664}, {0.8, 2.39, 0.673}, {0.6, 2.14, 0.692}};
    const auto alphas = grid(0.55, 0.80, 0.002);
    for (const auto& t : targets) {
        const Peak p = onoff_peak(t.eta, alphas, 11);
        line.check(std::abs(p.bell - t.bell) <= 0.02 && std::abs(p.alpha - t.alpha) <= 0.01,
                   "eta " + fmt("%.1f", t.eta) + ": B " + fmt("%.4f", p.bell) + " at " + fmt("%.3f", p.alpha));
    }
}

void criterion3(Line& line)
{
    FamilyParams half;
    half.eta = 0.5;
    double worst = 0.0;
    for (const auto& pt : scan_alpha(Family::onoff, half, grid(0.05, 1.5, 0.05), optimizer(12)))
        worst = std::max(worst, std::abs(pt.result.best_value - 2.0));
    line.check(worst <= 2e-3, "eta 0.5: max |B - 2| " + fmt("%.1e", worst));

    const auto alphas = grid(0.6, 0.78, 0.002);
    double lo = 1.0, hi = 0.0;
    for (int k = 11; k <= 20; ++k) {
        const double eta = 0.05 * k;
        const Peak p = onoff_peak(eta, alphas, 13);
        if (k == 11)
            line.check(p.bell > 2.0, "eta 0.55: B " + fmt("%.5f", p.bell));
        lo = std::min(lo, p.alpha);
        hi = std::max(hi, p.alpha);
    }
    line.check(lo > 0.66 && hi < 0.71, "optimal alpha in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]");
}

void criterion4(Line& line)
{
    const auto alphas = grid(0.05, 1.5, 0.05);
    const auto full = scan_alpha(Family::parity, {}, alphas, optimizer(14), std::make_pair(0.0, 1e9));
    const auto real = scan_alpha(Family::parity_real, {}, alphas, optimizer(14), std::make_pair(0.0, 1e9));
    bool above = true, monotone = true, bounded = true, below = true;
    double gap = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double b = full[i].result.best_value, r = real[i].result.best_value;
        above = above && b > 2.0;
        bounded = bounded && b <= kCirelson + 1e-9 && r <= kCirelson + 1e-9;
        if (i > 0)
            monotone = monotone && b >= full[i - 1].result.best_value;
        below = below && r <= b + 1e-9;
        gap = std::max(gap, b - r);
    }
    line.check(above, "B > 2 on grid");
    line.check(monotone, "non-decreasing");
    line.check(full.back().result.best_value >= 2.7, "B(1.5) " + fmt("%.4f", full.back().result.best_value));
    line.check(bounded, "B <= 2 sqrt 2");
    line.check(below && gap > 1e-6, "real-restricted below, max gap " + fmt("%.4f", gap));
}

Eigen::MatrixXcd block_to_fock(const BlockEvolution& b, int N)
{
    Eigen::MatrixXcd m = dyad_to_fock(b.dyad, N);
    if (b.feeding)
        m += integral_to_fock(*b.feeding, N);
    return m;
}

void criterion5(Line& line)
{
    const double chi = 1.0, t = kPi / 2.0;
    DecoherenceParams p;
    p.chi = chi;
    p.kappa = 0.02 * chi;
    p.gammac = 0.01 * chi;
    const Complex a = 0.5;
    const int N = 40;

    Eigen::VectorXcd psi(2 * N);
    psi.head(N) = coherent_fock(a, N) / std::sqrt(2.0);
    psi.tail(N) = coherent_fock(a, N) / std::sqrt(2.0);
    const DensityMatrix rho({2, N}, psi * psi.adjoint());
    const Eigen::MatrixXcd num = lindblad_evolve(rho, p.kappa, p.gammac, chi, t, 64).matrix();

    const CoherentDyad src{0.5, a, a};
    Eigen::MatrixXcd ana(2 * N, 2 * N);
    ana.topLeftCorner(N, N) = block_to_fock(interact_block(Block::ee, src, p, t), N);
    ana.topRightCorner(N, N) = block_to_fock(interact_block(Block::eg, src, p, t), N);
    ana.bottomLeftCorner(N, N) = block_to_fock(interact_block(Block::ge, src, p, t), N);
    ana.bottomRightCorner(N, N) = block_to_fock(interact_block(Block::gg, src, p, t, src), N);
    const double err = (ana - num).cwiseAbs().maxCoeff();
    line.check(err < 1e-6, "max elementwise error " + fmt("%.2e", err));
}

void criterion6(Line& line)
{
    DecoherenceParams p;
    p.chi = 2.0;
    Timeline tl;
    tl.t1 = 0.1;
    tl.t2 = 0.2;
    tl.t3 = kPi / (2.0 * p.chi);
    tl.t4 = 0.4;
    tl.t5 = 1.0;
    tl.t6 = 0.1;
    tl.v = 1.0;
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Complex alpha = std::polar(1.5 * u(rng), 2.0 * kPi * u(rng));
        const Complex beta = std::polar(1.5 * u(rng), 2.0 * kPi * u(rng));
        const double phi = 2.0 * kPi * u(rng);
        worst = std::max(worst, std::abs(final_correlation(phi, beta, p, tl, alpha)
                                         - corr_indirect(alpha, kPi / 2.0, phi, beta, kPi / 2.0)));
    }
    line.check(worst <= 1e-8, "max residual " + fmt("%.2e", worst));
}

void criterion7(Line& line)
{
    const ScanTable t = run_scan(load_config(kConfigDir + "/paper_fig5.toml"));
    const auto& best = t.summary["best_over_alpha"];
    double prev = 1e9;
    bool decreasing = true;
    std::string values;
    for (const auto& row : best) {
        const double l = row["separation_m"].get<double>(), b = row["bell"].get<double>();
        decreasing = decreasing && b < prev;
        prev = b;
        values += (values.empty() ? "" : " ") + fmt("%g", l) + "m:" + fmt("%.4f", b);
        if (l == 0.1)
            line.check(std::abs(b - 2.7) <= 0.05, "l 0.1 m: B " + fmt("%.4f", b));
        if (l == 2.0)
            line.check(b > 2.0, "l 2 m: B " + fmt("%.4f", b));
    }
    line.check(decreasing && best.size() == 5, "strictly decreasing (" + values + ")");
}

void criterion8(Line& line)
{
    const LocalityReport r = run_locality(load_config(kConfigDir + "/paper_fig6.toml"));
    const auto& s = r.with_t6;
    line.check(std::abs(s.t4 - 236.0) <= 0.236, "t4 " + fmt("%.4f", s.t4) + " s");
    line.check(std::abs(s.t5 - 96.8e-6) <= 96.8e-9, "t5 " + fmt("%.4f", s.t5 * 1e6) + " us");
    const double own = 250.0 * (s.t4 + s.t5);
    line.check(std::abs(s.l - 59.0e3) <= 0.005 * 59.0e3 && std::abs(s.l - own) <= 0.005 * own,
               "l " + fmt("%.2f", s.l / 1e3) + " km");
    const auto& n = r.without_t6;
    const double own_n = 250.0 * (n.t4 + n.t5);
    line.check(std::abs(n.l - 53.0e3) <= 0.005 * 53.0e3 && std::abs(n.l - own_n) <= 0.005 * own_n,
               "l without t6 " + fmt("%.2f", n.l / 1e3) + " km");
    line.check(std::abs(r.waveguide_diameter_m - 3.44e-3) <= 1e-5,
               "diameter " + fmt("%.3f", r.waveguide_diameter_m * 1e3) + " mm");
}

void threshold_check(Line& line, RunConfig cfg, double tatom, double tc_target, double alpha_target)
{
    cfg.contour.tatom_s = tatom;
    const Threshold th = bell_threshold(cfg);
    const std::string label = std::isinf(tatom) ? "T_atom inf" : "T_atom " + fmt("%g", tatom);
    if (!th.found) {
        line.check(false, label + ": no threshold in range");
        return;
    }
    line.check(std::abs(th.tc_s - tc_target) <= 0.1 * tc_target && std::abs(th.alpha - alpha_target) <= 0.05,
               label + ": T_C " + fmt("%.1f", th.tc_s) + " s at " + fmt("%.3f", th.alpha) + " (want " +
                   fmt("%g", tc_target) + ", " + fmt("%g", alpha_target) + ")");
}

void criterion9(Line& line, double t4)
{
    RunConfig cfg = load_config(kConfigDir + "/paper_fig6.toml");
    cfg.contour.t4_s = t4;
    line.check(true, "t4 " + fmt("%.3f", contour_timeline(cfg).t4) + " s");
    threshold_check(line, cfg, 2000.0, 1160.0, 0.47);
    threshold_check(line, cfg, std::numeric_limits<double>::infinity(), 590.0, 0.3);
}

void criterion10(Line& line)
{
    RunConfig cfg = load_config(kConfigDir + "/onoff_minimal.toml");
    cfg.optimizer.threads = 4;
    const std::string a = to_csv(run_scan(cfg));
    cfg.optimizer.threads = 1;
    const std::string b = to_csv(run_scan(cfg));
    line.check(a == b && !a.empty(), "onoff scan CSV " + std::to_string(a.size()) + " bytes identical");

    RunConfig dec = load_config(kConfigDir + "/paper_fig5.toml");
    const std::string c = to_csv(run_scan(dec));
    dec.optimizer.threads = 1;
    line.check(c == to_csv(run_scan(dec)), "decohered scan CSV identical");
}

}  // namespace

int main()
{
    run("1", criterion1);
    run("2", criterion2);
    run("3", criterion3);
    run("4", criterion4);
    run("5", criterion5);
    run("6", criterion6);
    run("7", criterion7);
    run("8", criterion8);
    run("9", [](Line& l) { criterion9(l, -1.0); });
    run("10", criterion10);
    // not counted: flight time t4 = 236.0 s from the locality solver instead of the quoted distance
    run("9-alt", [](Line& l) { criterion9(l, 236.0); }, false);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
