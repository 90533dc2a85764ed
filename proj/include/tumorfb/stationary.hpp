#pragma once

#include "tumorfb/model.hpp"
#include "tumorfb/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tumorfb {

enum class Stability { Stable, Unstable, Degenerate };

std::string_view to_string(Stability s);

struct StationaryRoot {
    double radius = 0.0;
    int slope_sign = 0; ///< sign of F' at the root
    Stability stability = Stability::Degenerate;
};

/// Extremum of F, the threshold theta_* = F(r_#) and the solutions of
/// F(R) = sigma_tilde, in scaled coordinates.
struct StationaryLandscape {
    double r_sharp = 0.0;
    double theta_star = 0.0;
    std::vector<StationaryRoot> roots; ///< ascending radius
    ModelParams params;
    SmoothingSpec spec;

    [[nodiscard]] std::optional<double> small_root() const;
    [[nodiscard]] std::optional<double> large_root() const;
};

/// Absolute tolerance of golden-section and bisection refinement.
inline constexpr double kRootTolerance = 1e-10;
/// |sigma_tilde - theta_*| at or below which the single degenerate root is reported.
inline constexpr double kDegenerateTolerance = 1e-9;

/// Central-difference derivative of F with step 1e-6 r.
double eval_F_slope(double r, const ModelParams& params, const SmoothingSpec& spec);

double find_r_sharp(const ModelParams& params, const SmoothingSpec& spec);
double compute_theta_star(const ModelParams& params, const SmoothingSpec& spec);

StationaryLandscape find_stationary_radii(double sigma_tilde, const ModelParams& params, const SmoothingSpec& spec);

/// Closed-form stationary profile sampled on a uniform grid of n_grid points.
RadialProfile stationary_solution(double R_s, const ModelParams& params, const SmoothingSpec& spec,
                                  std::size_t n_grid);

enum class ScanAxis { Gamma, SigmaTilde };

std::string_view to_string(ScanAxis axis);
ScanAxis scan_axis_from_string(std::string_view name);

struct ScanSample {
    double value = 0.0;
    std::optional<StationaryLandscape> landscape;
    std::string error; ///< non-empty when the sample failed
};

struct BifurcationScan {
    ScanAxis axis = ScanAxis::Gamma;
    std::vector<ScanSample> samples;
};

/// Samples the landscape on n_samples equispaced values of the chosen
/// parameter. For the Gamma axis the cut-off follows gamma. A single sample
/// is taken at lo. `threads` > 1 evaluates samples concurrently.
BifurcationScan scan_bifurcation(ScanAxis axis, double lo, double hi, std::size_t n_samples,
                                 const ModelParams& fixed, SmoothingKind kind, unsigned threads = 1);

} // namespace tumorfb
