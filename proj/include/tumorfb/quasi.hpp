#pragma once

#include "tumorfb/model.hpp"
#include "tumorfb/stationary.hpp"
#include "tumorfb/trajectory.hpp"

#include <optional>
#include <vector>

namespace tumorfb {

/// dR/dt = (mu/3) (sigma_bar F(R) - sigma_tilde) R for the quasi-stationary
/// reduction (c = 0), with F evaluated in the scaled frame.
double rhs_quasi(double R, const ModelParams& params, const SmoothingSpec& spec);

struct QuasiOptions {
    double rtol = 1e-9;
    double atol = 1e-14;
    double extinction_floor = 1e-8;
    double stationary_rate = 1e-12; ///< stop once |R'|/R falls below
    double dt_init = 1e-3;
    double dt_min = 1e-14;
    /// Extra times the integrator must step onto exactly (ascending).
    std::vector<double> output_times;
    /// Record only the initial point and the output times, plus the final state.
    bool record_outputs_only = false;
};

/// Dormand-Prince 5(4) integration of rhs_quasi from R0 up to t_end.
/// Step-size underflow returns the partial trajectory tagged Failed.
Trajectory integrate_quasi(double R0, double t_end, const ModelParams& params, const SmoothingSpec& spec,
                           const QuasiOptions& opts = {});

enum class Outcome { ExtinctionToZero, ConvergesTo, Undecided };

std::string_view to_string(Outcome o);

struct LimitClassification {
    Outcome outcome = Outcome::Undecided;
    double limit = 0.0; ///< target radius for ConvergesTo
    double final_radius = 0.0;
    double final_rate = 0.0;
    std::optional<double> fitted_rate;
};

struct ClassifyOptions {
    double tol_conv = 1e-5;  ///< |R_final - R_s2| for ConvergesTo
    double tol_rate = 1e-6;  ///< |R'| / R for ConvergesTo
    double extinction_floor = 1e-8;
};

/// Limit of a trajectory against the landscape's stable root. Radii in the
/// trajectory must be in the same units as the landscape.
LimitClassification classify_limit(const Trajectory& traj, const StationaryLandscape& landscape,
                                   const ClassifyOptions& opts = {});

/// Least-squares slope of log|R(t) - R_target| over samples with the
/// deviation inside (1e-8, 1e-2). Negative for an attracting target.
double measure_linear_rate(const Trajectory& traj, double R_target, double lo = 1e-8, double hi = 1e-2);

} // namespace tumorfb
