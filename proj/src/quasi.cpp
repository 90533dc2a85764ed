#include "tumorfb/quasi.hpp"

#include "tumorfb/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace tumorfb {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct StepResult {
    double y5;
    double err;
    double k7; ///< derivative at the new point (FSAL)
};

template <class Rhs>
StepResult dopri_step(const Rhs& f, double y, double k1, double h)
{
    const double k2 = f(y + h * kA21 * k1);
    const double k3 = f(y + h * (kA31 * k1 + kA32 * k2));
    const double k4 = f(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const double k5 = f(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const double k6 = f(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const double y5 = y + h * (kB5[0] * k1 + kB5[2] * k3 + kB5[3] * k4 + kB5[4] * k5 + kB5[5] * k6);
    const double k7 = (y5 > 0.0) ? f(y5) : 0.0;
    const double y4 = y + h * (kB4[0] * k1 + kB4[2] * k3 + kB4[3] * k4 + kB4[4] * k5 + kB4[5] * k6 + kB4[6] * k7);
    return {y5, y5 - y4, k7};
}

} // namespace

double rhs_quasi(double R, const ModelParams& params, const SmoothingSpec& spec)
{
    if (!(R > 0.0))
        throw InvalidArgument("rhs_quasi needs a positive radius");
    return params.mu / 3.0 * (params.sigma_bar * eval_F_user(R, params, spec) - params.sigma_tilde) * R;
}

Trajectory integrate_quasi(double R0, double t_end, const ModelParams& params, const SmoothingSpec& spec,
                           const QuasiOptions& opts)
{
    if (!(R0 > 0.0)) throw InvalidArgument("integrate_quasi needs R0 > 0");
    if (!(t_end > 0.0)) throw InvalidArgument("integrate_quasi needs t_end > 0");
    params.validate();

    Trajectory traj;
    traj.params = params;
    traj.spec = spec;
    traj.integrator = Integrator::QuasiStationary;

    // Before the first step the radius is positive, so the guard in the
    // tableau only matters for trial stages.
    auto f = [&](double R) { return R > 0.0 ? rhs_quasi(R, params, spec) : 0.0; };

    double t = 0.0;
    double R = R0;
    double k1 = f(R);
    auto record = [&] {
        traj.times.push_back(t);
        traj.radii.push_back(R);
        traj.rates.push_back(k1);
    };
    record();

    auto finished = [&]() -> bool {
        if (R < opts.extinction_floor) {
            traj.termination = Termination::Extinction;
            return true;
        }
        if (std::abs(k1) / R < opts.stationary_rate) {
            traj.termination = Termination::Stationary;
            return true;
        }
        return false;
    };
    if (finished())
        return traj;

    auto next_output = opts.output_times.begin();
    while (next_output != opts.output_times.end() && *next_output <= 0.0)
        ++next_output;

    double h = std::min(opts.dt_init, t_end);
    while (t < t_end) {
        double target = t_end;
        bool hits_output = false;
        if (next_output != opts.output_times.end() && *next_output < t_end) {
            target = *next_output;
            hits_output = true;
        }
        const bool clipped = t + h >= target;
        const double step = clipped ? target - t : h;

        const StepResult res = dopri_step(f, R, k1, step);
        const double scale = opts.atol + opts.rtol * std::max(std::abs(R), std::abs(res.y5));
        const double err = std::abs(res.err) / scale;

        if (!(res.y5 > 0.0) || !(err <= 1.0) || !std::isfinite(res.y5)) {
            h = (!(res.y5 > 0.0) || !std::isfinite(err)) ? 0.5 * step
                                                           : step * std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < opts.dt_min * std::max(1.0, t)) {
                std::ostringstream os;
                os.precision(17);
                os << "step size underflow at t = " << t << " (R = " << R << ")";
                traj.termination = Termination::Failed;
                traj.message = os.str();
                return traj;
            }
            continue;
        }

        t = clipped ? target : t + step;
        R = res.y5;
        k1 = res.k7;
        const bool at_output = clipped && hits_output;
        if (at_output)
            ++next_output;
        if (!opts.record_outputs_only || at_output || t >= t_end)
            record();
        if (finished()) {
            if (opts.record_outputs_only && !at_output && t < t_end)
                record();
            return traj;
        }

        const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
        // Keep the nominal step when the last one was shortened to hit a target.
        h = clipped ? std::max(h, step * grow) : step * grow;
        // Near a stable equilibrium the error control alone lets h sit on the
        // edge of the stability interval and the radius jitters at the
        // tolerance level. Cap h * |df/dR| well inside it.
        const double dR = 1e-7 * R;
        const double jac = (f(R + dR) - k1) / dR;
        if (jac < 0.0)
            h = std::min(h, 2.0 / -jac);
    }
    return traj;
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::ExtinctionToZero: return "extinction";
    case Outcome::ConvergesTo: return "converges";
    case Outcome::Undecided: return "undecided";
    }
    return "undecided";
}

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::ReachedEnd: return "reached_end";
    case Termination::Extinction: return "extinction";
    case Termination::Stationary: return "stationary";
    case Termination::Failed: return "failed";
    }
    return "failed";
}

LimitClassification classify_limit(const Trajectory& traj, const StationaryLandscape& landscape,
                                   const ClassifyOptions& opts)
{
    LimitClassification out;
    if (traj.empty())
        return out;
    out.final_radius = traj.final_radius();
    out.final_rate = traj.final_rate();
    if (traj.termination == Termination::Failed)
        return out;
    if (traj.termination == Termination::Extinction || out.final_radius < opts.extinction_floor) {
        out.outcome = Outcome::ExtinctionToZero;
        return out;
    }
    if (const auto rs2 = landscape.large_root()) {
        const bool near = std::abs(out.final_radius - *rs2) < opts.tol_conv;
        const bool slow = std::abs(out.final_rate) / out.final_radius < opts.tol_rate;
        if (near && slow) {
            out.outcome = Outcome::ConvergesTo;
            out.limit = *rs2;
            // A discrete solver settles on its own equilibrium, a resolution
            // error away from R_s2; fit against that when it was reached.
            const double target = traj.termination == Termination::Stationary ? out.final_radius : *rs2;
            try {
                out.fitted_rate = measure_linear_rate(traj, target);
            } catch (const std::exception&) {
                // Started too close to the limit to fit a rate.
            }
        }
    }
    return out;
}

double measure_linear_rate(const Trajectory& traj, double R_target, double lo, double hi)
{
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double dev = std::abs(traj.radii[i] - R_target);
        if (dev > lo && dev < hi) {
            const double t = traj.times[i];
            const double y = std::log(dev);
            sum_t += t;
            sum_y += y;
            sum_tt += t * t;
            sum_ty += t * y;
            ++count;
        }
    }
    if (count < 10) {
        std::ostringstream os;
        os << "only " << count << " samples inside the fitting window (need 10)";
        throw NumericalError(os.str());
    }
    const double n = static_cast<double>(count);
    const double denom = n * sum_tt - sum_t * sum_t;
    if (!(denom > 0.0))
        throw NumericalError("degenerate fitting window");
    return (n * sum_ty - sum_t * sum_y) / denom;
}

} // namespace tumorfb
