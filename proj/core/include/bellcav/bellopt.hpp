#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellcav/decoherence.hpp"

namespace bellcav {

struct OptimizerConfig {
    int restarts = 64;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    int max_iterations = 2000;
    double fd_step = 1e-5;
    unsigned threads = 0;  ///< 0 selects hardware concurrency
};

struct OptimizationResult {
    double best_value = 0.0;
    std::vector<double> argmax;
    int restarts_used = 0;
    bool converged = false;
};

/// Correlation families.
/// Packed settings:
///   onoff, parity, indirect: (theta, phi, theta', phi', Re b, Im b, Re b', Im b')
///   parity_real:             (theta, theta', Re b, Im b, Re b', Im b'), phi = 0
///   decohered:               (phi, phi', Re b, Im b, Re b', Im b')
enum class Family { onoff, parity, parity_real, indirect, decohered };

Family family_from_string(const std::string& name);
std::string to_string(Family f);
int family_dims(Family f);

struct FamilyParams {
    Complex alpha = 0.0;
    double eta = 1.0;
    double chi_t = kPi / 2.0;
    DecoherenceParams decoherence;
    Timeline timeline;
};

struct BellProblem {
    int dims = 0;
    std::function<double(const std::vector<double>&)> objective;
    std::function<void(std::vector<double>&)> canonicalize;
    std::vector<std::pair<double, double>> start_box;
};

BellProblem make_problem(Family family, const FamilyParams& fixed);

/// Multi-start quasi-Newton ascent with central finite-difference gradients and backtracking.
/// `warm_starts` are tried before the random starts.
OptimizationResult maximize_bell(const BellProblem& problem, const OptimizerConfig& config,
                                 const std::vector<std::vector<double>>& warm_starts = {});
OptimizationResult maximize_bell(Family family, const FamilyParams& fixed, int dims, const OptimizerConfig& config);

/// Positive root of the on/off optimality condition, scanning (0, 5] at step 1e-3.
double solve_beta_onoff(double alpha_mag, double eta);

/// Root of (a - b)/(a + b) = tan(4ab) nearest to zero.
double solve_beta_parity(double alpha_mag);

/// CHSH value at theta = pi, phi = pi; theta' = 0; beta = -beta' = |beta| from solve_beta_onoff.
double onoff_bell_analytic_settings(double alpha_mag, double eta);

/// CHSH value at (pi/2, 0), (pi/2, pi/2); beta = -beta' = i|beta| from solve_beta_parity.
double parity_bell_analytic_settings(double alpha_mag);

struct ScanPoint {
    double alpha = 0.0;
    OptimizationResult result;
    bool dropout = false;
};

/// Per-alpha optimization warm-started from the previous grid point.
/// A point whose objective fails numerically is kept with converged = false and a NaN value.
/// Dropouts are flagged inside `monotone_region` when B falls by more than 0.05.
std::vector<ScanPoint> scan_alpha(Family family, FamilyParams fixed, const std::vector<double>& alpha_grid,
                                  const OptimizerConfig& config,
                                  std::optional<std::pair<double, double>> monotone_region = std::nullopt);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double uniform01(std::uint64_t bits);

}  // namespace bellcav
