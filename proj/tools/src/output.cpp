#include "bellcav_app/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bellcav/types.hpp"

namespace bellcav::app {

std::vector<std::string> ScanTable::columns() const
{
    std::vector<std::string> cols = var_names;
    cols.push_back("bell");
    cols.insert(cols.end(), argmax_names.begin(), argmax_names.end());
    for (const char* c : {"restarts_used", "converged", "dropout", "quadrature_error"})
        cols.emplace_back(c);
    return cols;
}

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const ScanTable& t)
{
    std::string out;
    const auto cols = t.columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i)
            out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const auto& r : t.records) {
        std::string line;
        auto add = [&line](const std::string& s) {
            if (!line.empty())
                line += ',';
            line += s;
        };
        for (double v : r.vars)
            add(format_double(v));
        add(format_double(r.bell));
        for (std::size_t i = 0; i < t.argmax_names.size(); ++i)
            add(i < r.argmax.size() ? format_double(r.argmax[i]) : "nan");
        add(std::to_string(r.restarts_used));
        add(r.converged ? "true" : "false");
        add(r.dropout ? "true" : "false");
        add(format_double(r.quadrature_error));
        out += line;
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const ScanTable& t)
{
    using nlohmann::json;
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = t.kind;
    j["family"] = t.family;
    j["seed"] = t.seed;
    j["columns"] = t.columns();
    json records = json::array();
    for (const auto& r : t.records) {
        json row = json::object();
        for (std::size_t i = 0; i < t.var_names.size(); ++i)
            row[t.var_names[i]] = num(r.vars[i]);
        row["bell"] = num(r.bell);
        for (std::size_t i = 0; i < t.argmax_names.size(); ++i)
            row[t.argmax_names[i]] = i < r.argmax.size() ? num(r.argmax[i]) : json(nullptr);
        row["restarts_used"] = r.restarts_used;
        row["converged"] = r.converged;
        row["dropout"] = r.dropout;
        row["quadrature_error"] = num(r.quadrature_error);
        records.push_back(std::move(row));
    }
    j["records"] = std::move(records);
    j["summary"] = t.summary;
    return j;
}

void write_text_file(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw ValidationError("write failed for '" + path + "'");
}

void write_outputs(const ScanTable& table, const std::string& dir, const std::string& stem)
{
    const std::filesystem::path base = std::filesystem::path(dir) / stem;
    write_text_file(base.string() + ".csv", to_csv(table));
    write_text_file(base.string() + ".json", to_json(table).dump(2) + "\n");
}

}  // namespace bellcav::app
