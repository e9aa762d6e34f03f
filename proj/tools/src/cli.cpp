#include "bellcav_app/cli.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include "bellcav_app/runs.hpp"

namespace bellcav::app {

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> restarts;
    std::optional<unsigned> threads;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config, "TOML run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "optimizer seed (u64)");
    cmd->add_option("--restarts", o.restarts, "optimizer restarts per grid point")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores");
    cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const CommonOptions& o)
{
    RunConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
    if (o.seed)
        cfg.optimizer.seed = *o.seed;
    if (o.restarts)
        cfg.optimizer.restarts = *o.restarts;
    if (o.threads)
        cfg.optimizer.threads = *o.threads;
    if (!o.out.empty())
        cfg.out_dir = o.out;
    return cfg;
}

double parse_time(const std::string& text, const char* name)
{
    if (text == "inf" || text == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(std::string(name) + ": cannot parse '" + text + "'");
    }
}

int count_failed(const ScanTable& t)
{
    int n = 0;
    for (const auto& r : t.records)
        n += r.converged ? 0 : 1;
    return n;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bell-inequality tests with cavity fields and atoms", "bell-cli"};
    app.require_subcommand(1);

    CommonOptions scan_opts, contour_opts, loc_opts, oracle_opts;

    auto* scan = app.add_subcommand("scan", "optimize B over a grid and write CSV/JSON");
    add_common(scan, scan_opts);
    std::string family;
    std::vector<double> etas;
    scan->add_option("--family", family, "onoff, parity, parity_real, indirect or decohered");
    scan->add_option("--eta", etas, "detector efficiencies (onoff)");

    auto* contour = app.add_subcommand("contour", "storage time x |alpha| grid with the B = 2 threshold");
    add_common(contour, contour_opts);
    std::string tatom;
    std::optional<double> t4, separation;
    contour->add_option("--tatom", tatom, "atom lifetime in s, or inf");
    contour->add_option("--t4", t4, "flight time of atom A in s (overrides the separation)");
    contour->add_option("--separation", separation, "separation in m");

    auto* locality = app.add_subcommand("locality", "minimal flight times and waveguide diameter");
    add_common(locality, loc_opts);

    auto* oracle = app.add_subcommand("oracle-check", "closed forms against truncated-Fock computations");
    add_common(oracle, oracle_opts);
    int points = 5;
    oracle->add_option("--points", points, "grid points per axis")->check(CLI::Range(2, 50));

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (scan->parsed()) {
            RunConfig cfg = resolve(scan_opts);
            if (!family.empty())
                cfg.family = family_from_string(family);
            if (!etas.empty())
                cfg.eta = etas;
            cfg.validate();
            const ScanTable t = run_scan(cfg);
            const std::string stem = "scan_" + to_string(cfg.family);
            write_outputs(t, cfg.out_dir, stem);
            out << "wrote " << (std::filesystem::path(cfg.out_dir) / stem).string() << ".{csv,json} ("
                << t.records.size() << " records)\n";
            if (const int failed = count_failed(t))
                err << "warning: " << failed << " grid points did not converge\n";
            if (t.summary.contains("best_over_alpha"))
                for (const auto& b : t.summary["best_over_alpha"])
                    out << "  l = " << b["separation_m"].get<double>() << " m: max B = " << b["bell"].get<double>()
                        << " at |alpha| = " << b["alpha"].get<double>() << "\n";
            return kExitOk;
        }
        if (contour->parsed()) {
            RunConfig cfg = resolve(contour_opts);
            if (!tatom.empty())
                cfg.contour.tatom_s = parse_time(tatom, "--tatom");
            if (t4)
                cfg.contour.t4_s = *t4;
            if (separation) {
                cfg.contour.separation_m = *separation;
                if (!t4)
                    cfg.contour.t4_s = -1.0;
            }
            cfg.validate();
            const ScanTable t = run_contour(cfg);
            write_outputs(t, cfg.out_dir, "contour");
            out << "wrote " << (std::filesystem::path(cfg.out_dir) / "contour").string() << ".{csv,json}\n";
            if (t.summary["threshold_found"].get<bool>())
                out << "B = 2 threshold: T_C = " << t.summary["threshold_tc_s"].get<double>()
                    << " s at |alpha| = " << t.summary["threshold_alpha"].get<double>() << "\n";
            else
                out << "B = 2 threshold not inside the storage-time range\n";
            if (const int failed = count_failed(t))
                err << "warning: " << failed << " grid points did not converge\n";
            return kExitOk;
        }
        if (locality->parsed()) {
            const RunConfig cfg = resolve(loc_opts);
            const LocalityReport r = run_locality(cfg);
            out << r.to_text();
            write_text_file((std::filesystem::path(cfg.out_dir) / "locality.json").string(), r.to_json().dump(2) + "\n");
            return kExitOk;
        }
        if (oracle->parsed()) {
            const RunConfig cfg = resolve(oracle_opts);
            const auto checks = run_oracle_check(cfg, points);
            nlohmann::json j;
            j["schema_version"] = kSchemaVersion;
            j["checks"] = nlohmann::json::array();
            bool ok = true;
            for (const auto& c : checks) {
                out << (c.asserted ? (c.passed() ? "PASS " : "FAIL ") : "INFO ") << c.name
                    << " max residual " << format_double(c.max_residual);
                if (c.asserted)
                    out << " (tol " << c.tolerance << ")";
                out << "\n";
                ok = ok && c.passed();
                j["checks"].push_back({{"name", c.name},
                                       {"max_residual", c.max_residual},
                                       {"tolerance", c.tolerance},
                                       {"asserted", c.asserted},
                                       {"passed", c.passed()}});
            }
            write_text_file((std::filesystem::path(cfg.out_dir) / "oracle_check.json").string(), j.dump(2) + "\n");
            if (!ok) {
                err << "error: oracle residual above tolerance\n";
                return kExitNumerical;
            }
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << " (error estimate " << e.error_estimate() << ")\n";
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace bellcav::app
