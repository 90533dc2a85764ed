#pragma once

#include "tumorfb/model.hpp"
#include "tumorfb/profile.hpp"
#include "tumorfb/trajectory.hpp"

#include <optional>
#include <vector>

namespace tumorfb {

enum class TimeScheme { BackwardEuler, CrankNicolson };

std::string_view to_string(TimeScheme s);
TimeScheme time_scheme_from_string(std::string_view name);

struct SolverOpts {
    std::size_t n_grid = 201; ///< odd, >= 16
    double dt_init = 1e-3;
    double dt_max = 5e-2;
    double picard_tol = 1e-10; ///< relative change of the end-of-step radius
    int picard_max = 8;
    TimeScheme scheme = TimeScheme::BackwardEuler;

    double extinction_floor = 1e-8;
    double stationary_rate = 1e-12; ///< stop once |R'|/R falls below
    double bound_tol = 1e-6;        ///< relative slack on the a-priori radius bounds
    double max_principle_tol = 1e-8;
    double dt_min = 1e-13;
    std::vector<double> snapshot_times; ///< ascending
    /// Times the stepper must land on exactly without storing a profile.
    std::vector<double> output_times;
    /// When set, only the initial state, output/snapshot times and the final
    /// state are recorded.
    bool record_outputs_only = false;

    void validate() const;
};

/// dR/dt = mu R * integral_0^1 (u - sigma_tilde) y^2 dy by composite Simpson.
double radius_rate(const RadialProfile& profile, const ModelParams& params);

struct StepInfo {
    RadialProfile profile;
    bool accepted = false;
    int picard_iters = 0;
    double growth = 0.0; ///< effective R'/R over the step
};

/// One implicit step of c u_t = (y^2 u_y)_y / (R^2 y^2) + c (R'/R) y u_y - lambda u
/// with u_y(0) = 0 and u(1) = G(R), coupled to the exponential radius
/// update by Picard iteration. A non-converged Picard loop returns
/// accepted = false; a singular tridiagonal system throws NumericalError.
StepInfo step(const RadialProfile& profile, double dt, const ModelParams& params, const SmoothingSpec& spec,
              const SolverOpts& opts);

/// max_i |u_i - v(R y_i, R)|.
double sup_deviation_from_v(const RadialProfile& profile, const ModelParams& params, const SmoothingSpec& spec);

/// Adaptive-step integration from validated initial data up to t_end.
/// Bound violations or dt underflow end the run with Termination::Failed and
/// a diagnostic message; everything computed so far is kept.
Trajectory simulate_full(const InitialData& data, double t_end, const ModelParams& params,
                         const SmoothingSpec& spec, const SolverOpts& opts = {});

} // namespace tumorfb
