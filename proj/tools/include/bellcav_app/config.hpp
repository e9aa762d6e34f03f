#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bellcav/bellopt.hpp"
#include "bellcav_app/toml.hpp"

namespace bellcav::app {

/// Threshold-contour grid over cavity storage time and |alpha|.
struct ContourSpec {
    double tatom_s = 2000.0;  ///< atom lifetime, inf disables flight decay
    double tc_min_s = 100.0;
    double tc_max_s = 2500.0;
    int tc_count = 20;
    double alpha_min = 0.05;
    double alpha_max = 1.0;
    int alpha_count = 20;
    double separation_m = 52990.0;
    double t4_s = -1.0;  ///< overrides the separation when >= 0

    bool operator==(const ContourSpec&) const = default;
};

struct RunConfig {
    Family family = Family::onoff;
    std::vector<double> alpha;
    std::vector<double> eta{1.0};
    std::vector<double> separation_m;
    DecoherenceParams rates;
    Timeline timeline;
    OptimizerConfig optimizer;
    ContourSpec contour;
    double omega0_rad_per_s = 0.0;
    double light_speed_m_per_s = kSpeedOfLight;
    std::string out_dir = "out";

    void validate() const;
    bool operator==(const RunConfig& o) const;
};

/// Paper rates and timeline, |alpha| from 0.05 to 1.5 in steps of 0.05, eta = 1.
RunConfig default_config();

RunConfig config_from_toml(const TomlDocument& doc);
RunConfig load_config(const std::string& path);
RunConfig load_config_string(const std::string& text);

/// Canonical TOML with SI unit suffixes and 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

/// Uniform grid of `count` points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

}  // namespace bellcav::app
