#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace bellcav::app {

inline constexpr int kSchemaVersion = 1;

struct ScanRecord {
    std::vector<double> vars;
    double bell = 0.0;
    std::vector<double> argmax;
    int restarts_used = 0;
    bool converged = true;
    bool dropout = false;
    double quadrature_error = 0.0;
};

struct ScanTable {
    std::string kind;  ///< "scan" or "contour"
    std::string family;
    std::uint64_t seed = 0;
    std::vector<std::string> var_names;
    std::vector<std::string> argmax_names;
    std::vector<ScanRecord> records;
    nlohmann::json summary = nlohmann::json::object();

    std::vector<std::string> columns() const;
};

/// Header row plus one LF-terminated line per record, doubles at 17 significant digits.
std::string to_csv(const ScanTable& table);

nlohmann::json to_json(const ScanTable& table);

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`, creating `dir` as needed.
void write_outputs(const ScanTable& table, const std::string& dir, const std::string& stem);

void write_text_file(const std::string& path, const std::string& text);

/// %.17g, with "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double x);

}  // namespace bellcav::app
