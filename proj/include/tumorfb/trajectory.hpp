#pragma once

#include "tumorfb/model.hpp"
#include "tumorfb/profile.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tumorfb {

enum class Termination { ReachedEnd, Extinction, Stationary, Failed };

std::string_view to_string(Termination t);

enum class Integrator { QuasiStationary, FullSolver };

/// Time series of the radius produced by either integrator. The full
/// solver fills the per-step diagnostic columns; the quasi-stationary
/// integrator leaves them empty.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> radii;
    std::vector<double> rates; ///< dR/dt at each sample

    // Full-solver diagnostics, one entry per sample when present.
    std::vector<double> sup_dev_from_v;
    std::vector<double> dt_used;
    std::vector<int> picard_iters;
    std::vector<double> u_min;
    std::vector<double> u_max;

    std::vector<std::pair<double, RadialProfile>> snapshots;

    ModelParams params;
    SmoothingSpec spec;
    Integrator integrator = Integrator::QuasiStationary;
    Termination termination = Termination::ReachedEnd;
    std::string message; ///< diagnostics for Failed runs

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
    [[nodiscard]] double final_radius() const { return radii.back(); }
    [[nodiscard]] double final_rate() const { return rates.back(); }
    [[nodiscard]] bool has_diagnostics() const noexcept { return !sup_dev_from_v.empty(); }
};

} // namespace tumorfb
