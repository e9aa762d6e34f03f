#include "bellcav_app/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace bellcav::app {

namespace {

enum class Unit { time, rate, angular, velocity, length };

struct Suffix {
    const char* text;
    double scale;
};

const std::vector<Suffix>& suffixes(Unit u)
{
    static const std::vector<Suffix> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
    static const std::vector<Suffix> rate{{"per_s", 1.0}};
    static const std::vector<Suffix> angular{{"rad_per_s", 1.0}};
    static const std::vector<Suffix> velocity{{"m_per_s", 1.0}};
    static const std::vector<Suffix> length{{"m", 1.0}, {"km", 1e3}};
    switch (u) {
    case Unit::time: return time;
    case Unit::rate: return rate;
    case Unit::angular: return angular;
    case Unit::velocity: return velocity;
    case Unit::length: return length;
    }
    return time;
}

std::string path_of(const std::string& table, const std::string& key)
{
    return table.empty() ? key : table + "." + key;
}

std::string expected_keys(const std::string& table, const std::string& base, Unit u)
{
    std::string out;
    for (const auto& s : suffixes(u)) {
        if (!out.empty())
            out += ", ";
        out += path_of(table, base + "_" + s.text);
    }
    return out;
}

class TableReader {
public:
    TableReader(const TomlDocument& doc, std::string table) : doc_(doc), table_(std::move(table)) {}

    bool present() const { return doc_.tables.count(table_) > 0; }

    const std::vector<std::pair<std::string, TomlValue>>& entries() const
    {
        static const std::vector<std::pair<std::string, TomlValue>> none;
        auto it = doc_.tables.find(table_);
        return it == doc_.tables.end() ? none : it->second;
    }

    // value of a unit-suffixed quantity in SI, or nullopt when absent
    std::optional<double> quantity(const std::string& base, Unit u, bool required)
    {
        std::optional<double> out;
        for (const auto& [key, value] : entries()) {
            if (key != base && key.rfind(base + "_", 0) != 0)
                continue;
            const std::string suffix = key == base ? std::string() : key.substr(base.size() + 1);
            const Suffix* match = nullptr;
            for (const auto& s : suffixes(u))
                if (suffix == s.text)
                    match = &s;
            if (!match)
                throw ConfigError("unit-suffix mismatch for '" + path_of(table_, key) + "': expected one of "
                                  + expected_keys(table_, base, u));
            if (out)
                throw ConfigError("quantity '" + path_of(table_, base) + "' given more than once");
            if (!value.is_numeric())
                throw ConfigError("'" + path_of(table_, key) + "' must be a number");
            consumed_.insert(key);
            out = value.as_double() * match->scale;
        }
        if (!out && required)
            throw ConfigError("missing key '" + path_of(table_, base) + "' (expected one of "
                              + expected_keys(table_, base, u) + ")");
        return out;
    }

    std::vector<double> quantity_array(const std::string& base, Unit u, bool required)
    {
        std::optional<std::vector<double>> out;
        for (const auto& [key, value] : entries()) {
            if (key != base && key.rfind(base + "_", 0) != 0)
                continue;
            const std::string suffix = key == base ? std::string() : key.substr(base.size() + 1);
            const Suffix* match = nullptr;
            for (const auto& s : suffixes(u))
                if (suffix == s.text)
                    match = &s;
            if (!match)
                throw ConfigError("unit-suffix mismatch for '" + path_of(table_, key) + "': expected one of "
                                  + expected_keys(table_, base, u));
            consumed_.insert(key);
            out = numbers(value, path_of(table_, key));
            for (double& x : *out)
                x *= match->scale;
        }
        if (!out) {
            if (required)
                throw ConfigError("missing key '" + path_of(table_, base) + "' (expected one of "
                                  + expected_keys(table_, base, u) + ")");
            return {};
        }
        return *out;
    }

    const TomlValue* plain(const std::string& key, bool required)
    {
        const TomlValue* v = doc_.find(table_, key);
        if (!v && required)
            throw ConfigError("missing key '" + path_of(table_, key) + "'");
        if (v)
            consumed_.insert(key);
        return v;
    }

    std::optional<double> number(const std::string& key, bool required = false)
    {
        const TomlValue* v = plain(key, required);
        if (!v)
            return std::nullopt;
        if (!v->is_numeric())
            throw ConfigError("'" + path_of(table_, key) + "' must be a number");
        return v->as_double();
    }

    std::optional<std::int64_t> integer(const std::string& key, bool required = false)
    {
        const TomlValue* v = plain(key, required);
        if (!v)
            return std::nullopt;
        if (v->kind != TomlValue::Kind::integer)
            throw ConfigError("'" + path_of(table_, key) + "' must be an integer");
        return v->integer;
    }

    std::optional<std::string> string(const std::string& key, bool required = false)
    {
        const TomlValue* v = plain(key, required);
        if (!v)
            return std::nullopt;
        if (v->kind != TomlValue::Kind::string)
            throw ConfigError("'" + path_of(table_, key) + "' must be a string");
        return v->text;
    }

    static std::vector<double> numbers(const TomlValue& v, const std::string& path)
    {
        std::vector<double> out;
        if (v.is_numeric()) {
            out.push_back(v.as_double());
            return out;
        }
        if (v.kind != TomlValue::Kind::array)
            throw ConfigError("'" + path + "' must be a number or an array of numbers");
        for (const auto& item : v.items) {
            if (!item.is_numeric())
                throw ConfigError("'" + path + "' must contain only numbers");
            out.push_back(item.as_double());
        }
        return out;
    }

    void reject_unknown() const
    {
        for (const auto& [key, value] : entries())
            if (!consumed_.count(key))
                throw ConfigError("unknown key '" + path_of(table_, key) + "'");
    }

private:
    const TomlDocument& doc_;
    std::string table_;
    std::set<std::string> consumed_;
};

void check_range(double x, double lo, double hi, const std::string& path)
{
    if (!(x >= lo && x <= hi)) {
        std::ostringstream os;
        os.precision(17);
        os << path << ": value " << x << " outside [" << lo << ", " << hi << "]";
        throw ConfigError(os.str());
    }
}

void check_nonneg(double x, const std::string& path)
{
    if (!(x >= 0.0) || !std::isfinite(x)) {
        std::ostringstream os;
        os.precision(17);
        os << path << ": value " << x << " must be finite and >= 0";
        throw ConfigError(os.str());
    }
}

void check_positive(double x, const std::string& path)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream os;
        os.precision(17);
        os << path << ": value " << x << " must be finite and > 0";
        throw ConfigError(os.str());
    }
}

std::string fmt(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // keep floats recognisable as floats on reload
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

std::string fmt_array(const std::vector<double>& xs)
{
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += ", ";
        out += fmt(xs[i]);
    }
    return out + "]";
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, int count)
{
    if (count < 1)
        throw ConfigError("grid count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return out;
}

RunConfig default_config()
{
    RunConfig c;
    c.alpha.clear();
    for (int i = 1; i <= 30; ++i)
        c.alpha.push_back(0.05 * i);
    c.separation_m = {0.1, 0.5, 1.0, 2.0, 5.0};
    c.rates.kappa = 1.0 / (2.0 * 0.13);
    c.rates.gamma0 = 1.0 / (2.0 * 0.036);
    c.rates.gammac = 4.08;
    c.rates.gammap = c.rates.gamma0;
    c.rates.chi = 2.0 * kPi * 49.0 * 49.0 * 1e3 / (4.0 * 65.0);
    c.timeline.t1 = 80.0e-6;
    c.timeline.t2 = 166.5e-6;
    c.timeline.t3 = 27.1e-6;
    c.timeline.t5 = 96.8e-6;
    c.timeline.t6 = 20.0e-6;
    c.timeline.v = 250.0;
    c.omega0_rad_per_s = 2.0 * kPi * 51.1e9;
    return c;
}

void RunConfig::validate() const
{
    if (alpha.empty())
        throw ConfigError("alpha: grid must not be empty");
    for (double a : alpha)
        check_range(a, 0.0, 10.0, "alpha");
    if (eta.empty())
        throw ConfigError("eta: grid must not be empty");
    for (double e : eta)
        check_range(e, 0.0, 1.0, "eta");
    if (family == Family::decohered && separation_m.empty())
        throw ConfigError("separation.values: grid must not be empty");
    for (double l : separation_m)
        check_nonneg(l, "separation.values");
    check_nonneg(rates.kappa, "rates.kappa");
    check_nonneg(rates.gamma0, "rates.gamma0");
    check_nonneg(rates.gammac, "rates.gammac");
    check_nonneg(rates.gammap, "rates.gammap");
    check_nonneg(rates.chi, "rates.chi");
    check_nonneg(timeline.t1, "timeline.t1");
    check_nonneg(timeline.t2, "timeline.t2");
    check_nonneg(timeline.t3, "timeline.t3");
    check_nonneg(timeline.t4, "timeline.t4");
    check_nonneg(timeline.t5, "timeline.t5");
    check_nonneg(timeline.t6, "timeline.t6");
    check_positive(timeline.v, "timeline.v");
    if (optimizer.restarts < 1)
        throw ConfigError("optimizer.restarts: must be >= 1");
    check_positive(optimizer.tol, "optimizer.tol");
    if (optimizer.max_iterations < 1)
        throw ConfigError("optimizer.max_iterations: must be >= 1");
    if (!(contour.tatom_s > 0.0))
        throw ConfigError("contour.tatom: must be > 0 (inf allowed)");
    check_positive(contour.tc_min_s, "contour.tc_min");
    check_positive(contour.tc_max_s, "contour.tc_max");
    if (contour.tc_max_s <= contour.tc_min_s)
        throw ConfigError("contour.tc_max: must exceed contour.tc_min");
    if (contour.tc_count < 2)
        throw ConfigError("contour.tc_count: must be >= 2");
    check_positive(contour.alpha_min, "contour.alpha_min");
    if (contour.alpha_max <= contour.alpha_min)
        throw ConfigError("contour.alpha_max: must exceed contour.alpha_min");
    if (contour.alpha_count < 2)
        throw ConfigError("contour.alpha_count: must be >= 2");
    check_nonneg(contour.separation_m, "contour.separation");
    check_nonneg(omega0_rad_per_s, "locality.omega0");
    check_positive(light_speed_m_per_s, "locality.c");
    if (out_dir.empty())
        throw ConfigError("out_dir: must not be empty");
}

bool RunConfig::operator==(const RunConfig& o) const
{
    const auto& r = rates;
    const auto& t = timeline;
    const auto& p = optimizer;
    return family == o.family && alpha == o.alpha && eta == o.eta && separation_m == o.separation_m
           && r.kappa == o.rates.kappa && r.gamma0 == o.rates.gamma0 && r.gammac == o.rates.gammac
           && r.gammap == o.rates.gammap && r.chi == o.rates.chi && t.t1 == o.timeline.t1 && t.t2 == o.timeline.t2
           && t.t3 == o.timeline.t3 && t.t4 == o.timeline.t4 && t.t5 == o.timeline.t5 && t.t6 == o.timeline.t6
           && t.v == o.timeline.v && p.restarts == o.optimizer.restarts && p.seed == o.optimizer.seed
           && p.tol == o.optimizer.tol && p.max_iterations == o.optimizer.max_iterations
           && p.fd_step == o.optimizer.fd_step && p.threads == o.optimizer.threads && contour == o.contour
           && omega0_rad_per_s == o.omega0_rad_per_s && light_speed_m_per_s == o.light_speed_m_per_s
           && out_dir == o.out_dir;
}

RunConfig config_from_toml(const TomlDocument& doc)
{
    static const std::set<std::string> known{"", "alpha", "separation", "rates", "timeline", "optimizer", "contour",
                                             "locality"};
    for (const auto& [name, entries] : doc.tables)
        if (!known.count(name))
            throw ConfigError("unknown table [" + name + "]");

    RunConfig c = default_config();

    TableReader root(doc, "");
    try {
        c.family = family_from_string(*root.string("family", true));
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("family: ") + e.what());
    }
    const TomlValue* seed = root.plain("seed", true);
    if (seed->kind == TomlValue::Kind::integer && seed->integer >= 0) {
        c.optimizer.seed = static_cast<std::uint64_t>(seed->integer);
    } else if (seed->kind == TomlValue::Kind::string && !seed->text.empty()
               && seed->text.find_first_not_of("0123456789") == std::string::npos) {
        try {
            c.optimizer.seed = std::stoull(seed->text);
        } catch (const std::exception&) {
            throw ConfigError("seed: does not fit in 64 bits");
        }
    } else {
        throw ConfigError("seed: must be a non-negative integer");
    }
    if (const TomlValue* eta = root.plain("eta", false))
        c.eta = TableReader::numbers(*eta, "eta");
    if (auto out = root.string("out_dir"))
        c.out_dir = *out;
    root.reject_unknown();

    TableReader alpha(doc, "alpha");
    if (alpha.present()) {
        if (const TomlValue* values = alpha.plain("values", false)) {
            c.alpha = TableReader::numbers(*values, "alpha.values");
        } else {
            const double lo = *alpha.number("start", true);
            const double hi = *alpha.number("stop", true);
            const auto n = *alpha.integer("count", true);
            if (n < 1 || n > 100000)
                throw ConfigError("alpha.count: value outside [1, 100000]");
            c.alpha = linear_grid(lo, hi, static_cast<int>(n));
        }
        alpha.reject_unknown();
    }

    TableReader sep(doc, "separation");
    if (sep.present()) {
        c.separation_m = sep.quantity_array("values", Unit::length, true);
        sep.reject_unknown();
    }

    TableReader rates(doc, "rates");
    if (rates.present()) {
        c.rates.kappa = *rates.quantity("kappa", Unit::rate, true);
        c.rates.gamma0 = *rates.quantity("gamma0", Unit::rate, true);
        c.rates.gammac = *rates.quantity("gammac", Unit::rate, true);
        c.rates.gammap = *rates.quantity("gammap", Unit::rate, true);
        c.rates.chi = *rates.quantity("chi", Unit::angular, true);
        rates.reject_unknown();
    }

    TableReader tl(doc, "timeline");
    if (tl.present()) {
        c.timeline.t1 = *tl.quantity("t1", Unit::time, true);
        c.timeline.t2 = *tl.quantity("t2", Unit::time, true);
        c.timeline.t3 = *tl.quantity("t3", Unit::time, true);
        c.timeline.t4 = tl.quantity("t4", Unit::time, false).value_or(0.0);
        c.timeline.t5 = *tl.quantity("t5", Unit::time, true);
        c.timeline.t6 = *tl.quantity("t6", Unit::time, true);
        c.timeline.v = *tl.quantity("v", Unit::velocity, true);
        tl.reject_unknown();
    }

    TableReader opt(doc, "optimizer");
    if (opt.present()) {
        if (auto r = opt.integer("restarts")) {
            if (*r < 1 || *r > 1000000)
                throw ConfigError("optimizer.restarts: value outside [1, 1000000]");
            c.optimizer.restarts = static_cast<int>(*r);
        }
        if (auto t = opt.number("tol"))
            c.optimizer.tol = *t;
        if (auto m = opt.integer("max_iterations")) {
            if (*m < 1 || *m > 100000000)
                throw ConfigError("optimizer.max_iterations: value outside [1, 100000000]");
            c.optimizer.max_iterations = static_cast<int>(*m);
        }
        if (auto h = opt.number("fd_step")) {
            check_positive(*h, "optimizer.fd_step");
            c.optimizer.fd_step = *h;
        }
        if (auto th = opt.integer("threads")) {
            if (*th < 0 || *th > 4096)
                throw ConfigError("optimizer.threads: value outside [0, 4096]");
            c.optimizer.threads = static_cast<unsigned>(*th);
        }
        opt.reject_unknown();
    }

    TableReader ct(doc, "contour");
    if (ct.present()) {
        auto& s = c.contour;
        if (auto v = ct.quantity("tatom", Unit::time, false))
            s.tatom_s = *v;
        if (auto v = ct.quantity("tc_min", Unit::time, false))
            s.tc_min_s = *v;
        if (auto v = ct.quantity("tc_max", Unit::time, false))
            s.tc_max_s = *v;
        if (auto v = ct.integer("tc_count")) {
            if (*v < 2 || *v > 10000)
                throw ConfigError("contour.tc_count: value outside [2, 10000]");
            s.tc_count = static_cast<int>(*v);
        }
        if (auto v = ct.number("alpha_min"))
            s.alpha_min = *v;
        if (auto v = ct.number("alpha_max"))
            s.alpha_max = *v;
        if (auto v = ct.integer("alpha_count")) {
            if (*v < 2 || *v > 10000)
                throw ConfigError("contour.alpha_count: value outside [2, 10000]");
            s.alpha_count = static_cast<int>(*v);
        }
        if (auto v = ct.quantity("separation", Unit::length, false))
            s.separation_m = *v;
        if (auto v = ct.quantity("t4", Unit::time, false)) {
            check_nonneg(*v, "contour.t4");
            s.t4_s = *v;
        }
        ct.reject_unknown();
    }

    TableReader loc(doc, "locality");
    if (loc.present()) {
        if (auto v = loc.quantity("omega0", Unit::angular, false))
            c.omega0_rad_per_s = *v;
        if (auto v = loc.quantity("c", Unit::velocity, false))
            c.light_speed_m_per_s = *v;
        loc.reject_unknown();
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    return config_from_toml(parse_toml_file(path));
}

RunConfig load_config_string(const std::string& text)
{
    return config_from_toml(parse_toml(text));
}

std::string serialize_config(const RunConfig& c)
{
    std::ostringstream os;
    os << "family = \"" << to_string(c.family) << "\"\n";
    if (c.optimizer.seed <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        os << "seed = " << c.optimizer.seed << "\n";
    else
        os << "seed = \"" << c.optimizer.seed << "\"\n";
    os << "eta = " << fmt_array(c.eta) << "\n";
    os << "out_dir = \"";
    for (char ch : c.out_dir) {
        if (ch == '"' || ch == '\\')
            os << '\\';
        os << ch;
    }
    os << "\"\n";

    os << "\n[alpha]\nvalues = " << fmt_array(c.alpha) << "\n";
    os << "\n[separation]\nvalues_m = " << fmt_array(c.separation_m) << "\n";

    os << "\n[rates]\n"
       << "kappa_per_s = " << fmt(c.rates.kappa) << "\n"
       << "gamma0_per_s = " << fmt(c.rates.gamma0) << "\n"
       << "gammac_per_s = " << fmt(c.rates.gammac) << "\n"
       << "gammap_per_s = " << fmt(c.rates.gammap) << "\n"
       << "chi_rad_per_s = " << fmt(c.rates.chi) << "\n";

    os << "\n[timeline]\n"
       << "t1_s = " << fmt(c.timeline.t1) << "\n"
       << "t2_s = " << fmt(c.timeline.t2) << "\n"
       << "t3_s = " << fmt(c.timeline.t3) << "\n"
       << "t4_s = " << fmt(c.timeline.t4) << "\n"
       << "t5_s = " << fmt(c.timeline.t5) << "\n"
       << "t6_s = " << fmt(c.timeline.t6) << "\n"
       << "v_m_per_s = " << fmt(c.timeline.v) << "\n";

    os << "\n[optimizer]\n"
       << "restarts = " << c.optimizer.restarts << "\n"
       << "tol = " << fmt(c.optimizer.tol) << "\n"
       << "max_iterations = " << c.optimizer.max_iterations << "\n"
       << "fd_step = " << fmt(c.optimizer.fd_step) << "\n"
       << "threads = " << c.optimizer.threads << "\n";

    const auto& s = c.contour;
    os << "\n[contour]\n"
       << "tatom_s = " << fmt(s.tatom_s) << "\n"
       << "tc_min_s = " << fmt(s.tc_min_s) << "\n"
       << "tc_max_s = " << fmt(s.tc_max_s) << "\n"
       << "tc_count = " << s.tc_count << "\n"
       << "alpha_min = " << fmt(s.alpha_min) << "\n"
       << "alpha_max = " << fmt(s.alpha_max) << "\n"
       << "alpha_count = " << s.alpha_count << "\n"
       << "separation_m = " << fmt(s.separation_m) << "\n";
    if (s.t4_s >= 0.0)
        os << "t4_s = " << fmt(s.t4_s) << "\n";

    os << "\n[locality]\n"
       << "omega0_rad_per_s = " << fmt(c.omega0_rad_per_s) << "\n"
       << "c_m_per_s = " << fmt(c.light_speed_m_per_s) << "\n";
    return os.str();
}

}  // namespace bellcav::app
