#pragma once

#include "tumorfb/full_solver.hpp"
#include "tumorfb/quasi.hpp"
#include "tumorfb/stationary.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace tumorfb {

enum class CheckStatus { Pass, Fail, Skipped };

std::string_view to_string(CheckStatus s);

struct Check {
    std::string name;
    std::string anchor;  ///< the claim being checked
    CheckStatus status = CheckStatus::Skipped;
    double measured_margin = 0.0; ///< positive when the claim holds with room to spare
    std::string details;
};

struct VerificationReport {
    std::vector<Check> checks;
    nlohmann::ordered_json scenario = nlohmann::ordered_json::object();
    /// Raw study outputs (ratios, fitted slopes) kept next to the checks.
    nlohmann::ordered_json measurements = nlohmann::ordered_json::object();

    [[nodiscard]] bool any_failed() const;
    [[nodiscard]] std::size_t count(CheckStatus s) const;
    void append(const VerificationReport& other);
};

/// Relative slack used by the bound audits.
inline constexpr double kAuditTolerance = 1e-6;

/// Maximum principle on every stored profile (per-step extrema and
/// snapshots for the full solver, the comparison profile v for the
/// quasi-stationary integrator), the growth-rate bounds on consecutive
/// log-slopes of R, and the radius envelope from R(0).
VerificationReport audit_bounds(const Trajectory& traj, const ModelParams& params);

struct ScalingStudy {
    std::vector<double> c_values;                               ///< strictly decreasing
    std::vector<std::vector<std::pair<double, double>>> deviations; ///< per c: (t, sup_dev)
    std::vector<double> max_deviation;                          ///< post-transient max per c
    std::vector<bool> skipped;                                  ///< failed simulations
    std::vector<std::string> messages;
    std::vector<double> ratios; ///< max_deviation[i] / max_deviation[i + 1] over usable neighbours
    double transient_end = 0.0;
    struct Fit {
        double slope_vs_c = 0.0;
        double residual = 0.0; ///< max_i |d_i - slope c_i| / d_i
    } fit;
};

/// Runs simulate_full from the comparison profile at R0 for every c and
/// measures sup|u - v| on a common time grid past 10 c |log c| (largest c).
ScalingStudy run_scaling_study(double R0, double t_end, const std::vector<double>& c_values,
                               const ModelParams& params, const SmoothingSpec& spec, const SolverOpts& opts,
                               std::size_t n_samples = 41, unsigned threads = 1);

struct OutcomeCase {
    double R0 = 1.0;
    double sigma_tilde = 0.3;
    double c = 0.0;
};

struct MatrixOptions {
    double t_end = 2000.0;
    double small_c = 1e-2;          ///< largest c treated as "small"
    double tol_conv_full = 1e-3;    ///< |R_final - R_s2| for the full solver
    std::size_t data_samples = 201; ///< comparison-profile initial data
    SolverOpts solver;
    QuasiOptions quasi;
};

/// The basin margin for the small-c predictions: 0.05 (R_s2 - R_s1),
/// shrunk if needed so that 1/eps >= 10 R_s2.
double basin_margin(double rs1, double rs2);

/// The c values a case is actually run at. Thresholds above sigma_bar
/// are exercised at {1e-3, 1e-1, 1, 10} plus the declared c.
std::vector<double> expanded_c_values(const OutcomeCase& oc, const ModelParams& params);

VerificationReport outcome_matrix(const std::vector<OutcomeCase>& cases, const ModelParams& params_base,
                                  const SmoothingSpec& spec, const MatrixOptions& opts = {}, unsigned threads = 1);

/// theta_* and R_s2 strictly decreasing, R_s1 strictly increasing along a
/// gamma scan. Root sequences are checked on the samples that have two roots.
VerificationReport audit_gamma_monotonicity(const BifurcationScan& scan);

struct ConvergenceStudy {
    std::size_t n_coarse = 0, n_fine = 0, n_reference = 0;
    double spatial_error_coarse = 0.0, spatial_error_fine = 0.0;
    double spatial_ratio = 0.0;
    std::vector<double> dt_values; ///< three halvings
    double be_ratio = 0.0;         ///< successive-difference ratios
    double cn_ratio = 0.0;
};

/// Final-radius convergence from the comparison profile at R0:
/// n_coarse, 2 n_coarse - 1 against 8 (n_coarse - 1) + 1 at fixed small dt,
/// then dt_coarse, dt_coarse / 2, dt_coarse / 4 at n_coarse for both schemes.
ConvergenceStudy run_convergence_study(double R0, double t_end, std::size_t n_coarse, double dt_coarse,
                                       const ModelParams& params, const SmoothingSpec& spec, unsigned threads = 1);

/// Pass/fail checks for a convergence study: spatial ratio in [3.5, 4.5],
/// backward Euler in [1.8, 2.2], Crank-Nicolson in [3.5, 4.5].
VerificationReport judge_convergence(const ConvergenceStudy& study);

/// Pass/fail checks for a scaling study: positive finite slope, every
/// halving ratio in [1.6, 2.4], fit residual below 20 %.
VerificationReport judge_scaling(const ScalingStudy& study);

} // namespace tumorfb
