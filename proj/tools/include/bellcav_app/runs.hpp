#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bellcav/locality.hpp"
#include "bellcav_app/config.hpp"
#include "bellcav_app/output.hpp"

namespace bellcav::app {

/// Runs body(i) for i in [0, n) on `threads` workers (0 = hardware concurrency).
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

std::vector<std::string> argmax_names(Family family);

/// One record per grid point. Optimizer families sweep (eta, alpha) for onoff and alpha otherwise;
/// the decohered family sweeps (separation, alpha) at the default settings.
ScanTable run_scan(const RunConfig& cfg);

/// Rates and timeline for one contour cell: kappa = 1/(2 T_C), gammap = 1/(2 T_atom).
DecoherenceParams contour_rates(const RunConfig& cfg, double tc_s);
Timeline contour_timeline(const RunConfig& cfg);

struct AlphaOptimum {
    double alpha = 0.0;
    double bell = 0.0;
};

/// Largest default-settings Bell value over |alpha|: grid search then Brent refinement.
AlphaOptimum best_alpha(const DecoherenceParams& p, const Timeline& tl, const std::vector<double>& grid);

struct Threshold {
    bool found = false;
    double tc_s = 0.0;
    double alpha = 0.0;
};

/// Smallest storage time in the contour range at which max over |alpha| of B reaches 2.
Threshold bell_threshold(const RunConfig& cfg);

/// T_C x |alpha| grid of Bell values; the summary carries the refined B = 2 threshold.
ScanTable run_contour(const RunConfig& cfg);

struct LocalityReport {
    LocalitySolution with_t6;
    LocalitySolution without_t6;
    bool with_t6_holds = false;
    bool without_t6_holds = false;
    bool simple_check = false;
    bool conventions_differ = false;
    double waveguide_diameter_m = 0.0;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

LocalityReport run_locality(const RunConfig& cfg);

struct OracleCheck {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;  ///< 0 for informational rows
    bool asserted = false;

    bool passed() const { return !asserted || max_residual <= tolerance; }
};

/// Closed forms against truncated-Fock computations on a grid of amplitudes and angles.
std::vector<OracleCheck> run_oracle_check(const RunConfig& cfg, int points_per_axis = 5);

}  // namespace bellcav::app
