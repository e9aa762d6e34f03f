#pragma once

#include <array>

#include "bellcav/decoherence.hpp"

namespace bellcav {

struct LocalityInputs {
    Timeline tl;  ///< t1, t2, t3, t6 and v are used
    double c = kSpeedOfLight;

    void validate() const;
};

struct LocalitySolution {
    double t4 = 0.0;
    double t5 = 0.0;
    double l = 0.0;
    std::array<double, 2> residuals{};  ///< slack of both light-cone inequalities, metres
};

/// d >= c(T + tA) and d >= c(tC - T)
bool check_locality_simple(double d, double T, double tA, double tC, double c = kSpeedOfLight);

/// Slack of both light-cone inequalities at (t4, t5), metres.
std::array<double, 2> locality_slack(const LocalityInputs& in, double t4, double t5, bool include_t6 = true);

/// Smallest (t4, t5) for which both light-cone inequalities hold with equality.
LocalitySolution min_travel_times(const LocalityInputs& in, bool include_t6 = true);

/// v (t4 + t5)
double separation_distance(double v, double t4, double t5);

/// Twice the TE11 cutoff radius 1.8412 c / omega0.
double max_waveguide_diameter(double omega0, double c = kSpeedOfLight);

}  // namespace bellcav
