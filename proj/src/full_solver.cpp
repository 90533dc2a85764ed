#include "tumorfb/full_solver.hpp"

#include "tumorfb/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tumorfb {

namespace {

/// Three-diagonal operator rows: lower[i] u_{i-1} + diag[i] u_i + upper[i] u_{i+1}.
struct Tridiagonal {
    std::vector<double> lower, diag, upper;
    explicit Tridiagonal(std::size_t m) : lower(m, 0.0), diag(m, 0.0), upper(m, 0.0) {}
};

/// Spatial operator for one radius R and growth K = R'/R on the nodes
/// 0 .. n-2 (node n-1 carries the Dirichlet value). Control-volume form of
/// (y^2 u_y)_y / y^2; the centre row reduces to 6 (u_1 - u_0) / h^2.
Tridiagonal spatial_operator(std::size_t n, double R, double K, const ModelParams& params)
{
    const std::size_t m = n - 1;
    const double h = 1.0 / static_cast<double>(n - 1);
    const double diffusion = 1.0 / (h * h * R * R);
    Tridiagonal op(m);
    op.diag[0] = -6.0 * diffusion - params.lambda;
    op.upper[0] = 6.0 * diffusion;
    for (std::size_t i = 1; i < m; ++i) {
        const double fi = static_cast<double>(i);
        const double volume = fi * fi + 1.0 / 12.0;
        const double west = (fi - 0.5) * (fi - 0.5) / volume * diffusion;
        const double east = (fi + 0.5) * (fi + 0.5) / volume * diffusion;
        // c (R'/R) y u_y with y_i / (2h) = i / 2.
        const double advect = 0.5 * params.c * K * fi;
        op.lower[i] = west - advect;
        op.diag[i] = -(west + east) - params.lambda;
        op.upper[i] = east + advect;
    }
    return op;
}

/// Thomas algorithm; rhs is overwritten with the solution.
void solve_tridiagonal(Tridiagonal sys, std::vector<double>& rhs)
{
    const std::size_t m = rhs.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) {
            const double w = sys.lower[i] / sys.diag[i - 1];
            sys.diag[i] -= w * sys.upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        if (!(std::abs(sys.diag[i]) > 0.0) || !std::isfinite(sys.diag[i])) {
            std::ostringstream os;
            os << "tridiagonal pivot " << i << " of " << m << " is " << sys.diag[i];
            throw NumericalError(os.str());
        }
    }
    rhs[m - 1] /= sys.diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;)
        rhs[i] = (rhs[i] - sys.upper[i] * rhs[i + 1]) / sys.diag[i];
}

double growth_of(const std::vector<double>& u, const ModelParams& params)
{
    const std::size_t n = u.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = static_cast<double>(i) * h;
        integrand[i] = (u[i] - params.sigma_tilde) * y * y;
    }
    return params.mu * simpson_unit(integrand);
}

std::vector<double> merged_targets(const SolverOpts& opts, double t_end)
{
    std::vector<double> out;
    for (double t : opts.snapshot_times)
        if (t > 0.0 && t < t_end) out.push_back(t);
    for (double t : opts.output_times)
        if (t > 0.0 && t < t_end) out.push_back(t);
    out.push_back(t_end);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::string_view to_string(TimeScheme s)
{
    return s == TimeScheme::BackwardEuler ? "backward_euler" : "crank_nicolson";
}

TimeScheme time_scheme_from_string(std::string_view name)
{
    if (name == "backward_euler") return TimeScheme::BackwardEuler;
    if (name == "crank_nicolson") return TimeScheme::CrankNicolson;
    throw InvalidArgument("unknown time scheme '" + std::string(name) +
                          "' (expected backward_euler or crank_nicolson)");
}

void SolverOpts::validate() const
{
    if (n_grid < 16 || n_grid % 2 == 0)
        throw InvalidArgument("n_grid must be odd and at least 16");
    if (!(dt_init > 0.0) || !(dt_max > 0.0) || dt_init > dt_max)
        throw InvalidArgument("time steps must satisfy 0 < dt_init <= dt_max");
    if (!(picard_tol > 0.0) || picard_max < 1)
        throw InvalidArgument("Picard settings must be positive");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()) ||
        !std::is_sorted(output_times.begin(), output_times.end()))
        throw InvalidArgument("snapshot and output times must be ascending");
}

double simpson_unit(std::span<const double> f)
{
    const std::size_t n = f.size();
    if (n < 3 || n % 2 == 0)
        throw InvalidArgument("Simpson quadrature needs an odd number (>= 3) of samples");
    const double h = 1.0 / static_cast<double>(n - 1);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        (i % 2 ? odd : even) += f[i];
    return h / 3.0 * (f.front() + 4.0 * odd + 2.0 * even + f.back());
}

double radius_rate(const RadialProfile& profile, const ModelParams& params)
{
    if (profile.n() % 2 == 0)
        throw InvalidArgument("radius_rate needs an odd number of grid points");
    return profile.R * growth_of(profile.u, params);
}

StepInfo step(const RadialProfile& profile, double dt, const ModelParams& params, const SmoothingSpec& spec,
              const SolverOpts& opts)
{
    if (!(dt > 0.0)) throw InvalidArgument("step needs dt > 0");
    if (!(params.c > 0.0)) throw InvalidArgument("the full solver needs c > 0");

    const std::size_t n = profile.n();
    const std::size_t m = n - 1;
    const double theta = opts.scheme == TimeScheme::BackwardEuler ? 1.0 : 0.5;
    const double inertia = params.c / dt;
    const double R_old = profile.R;
    const double K_old = growth_of(profile.u, params);

    // Explicit part of the right-hand side, fixed across Picard sweeps.
    std::vector<double> base(m);
    for (std::size_t i = 0; i < m; ++i)
        base[i] = inertia * profile.u[i];
    if (theta < 1.0) {
        const Tridiagonal old_op = spatial_operator(n, R_old, K_old, params);
        for (std::size_t i = 0; i < m; ++i) {
            double au = old_op.diag[i] * profile.u[i] + old_op.upper[i] * profile.u[i + 1];
            if (i > 0) au += old_op.lower[i] * profile.u[i - 1];
            base[i] += (1.0 - theta) * au;
        }
    }

    StepInfo info;
    info.profile.u.assign(n, 0.0);
    double K_new = K_old;
    double R_new = R_old * std::exp(dt * K_old);
    std::vector<double> rhs(m);
    for (int it = 1; it <= opts.picard_max; ++it) {
        info.picard_iters = it;
        const Tridiagonal op = spatial_operator(n, R_new, K_new, params);
        Tridiagonal sys(m);
        for (std::size_t i = 0; i < m; ++i) {
            sys.lower[i] = -theta * op.lower[i];
            sys.diag[i] = inertia - theta * op.diag[i];
            sys.upper[i] = -theta * op.upper[i];
        }
        const double boundary = eval_G(R_new, params, spec);
        rhs = base;
        rhs[m - 1] += theta * op.upper[m - 1] * boundary;
        solve_tridiagonal(std::move(sys), rhs);

        std::copy(rhs.begin(), rhs.end(), info.profile.u.begin());
        info.profile.u[m] = boundary;
        K_new = growth_of(info.profile.u, params);
        const double growth = theta * K_new + (1.0 - theta) * K_old;
        const double R_next = R_old * std::exp(dt * growth);
        const bool converged = std::abs(R_next - R_new) <= opts.picard_tol * R_next;
        R_new = R_next;
        info.growth = growth;
        if (converged) {
            info.accepted = true;
            break;
        }
    }
    info.profile.R = R_new;
    info.profile.u[m] = eval_G(R_new, params, spec);
    return info;
}

double sup_deviation_from_v(const RadialProfile& profile, const ModelParams& params, const SmoothingSpec& spec)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < profile.n(); ++i) {
        const double r = std::min(profile.R * profile.y(i), profile.R);
        worst = std::max(worst, std::abs(profile.u[i] - eval_comparison_profile_v(r, profile.R, params, spec)));
    }
    return worst;
}

Trajectory simulate_full(const InitialData& data, double t_end, const ModelParams& params,
                         const SmoothingSpec& spec, const SolverOpts& opts)
{
    params.validate();
    if (!(params.c > 0.0)) throw InvalidArgument("the full solver needs c > 0");
    if (!(t_end > 0.0)) throw InvalidArgument("simulate_full needs t_end > 0");
    opts.validate();
    const auto validation = validate_initial_data(data, params, spec);
    if (!validation.ok()) {
        const auto& v = validation.violations.front();
        std::ostringstream os;
        os << "initial data rejected: " << to_string(v.kind) << " at r = " << v.location
           << " (magnitude " << v.magnitude << ")";
        throw InvalidArgument(os.str());
    }

    Trajectory traj;
    traj.params = params;
    traj.spec = spec;
    traj.integrator = Integrator::FullSolver;

    RadialProfile current{resample_uniform(data.sigma0, opts.n_grid), data.R0};
    current.u.back() = eval_G(data.R0, params, spec);

    const double lo_rate = -params.mu * params.sigma_tilde / 3.0;
    const double hi_rate = params.mu * (params.sigma_bar - params.sigma_tilde) / 3.0;
    const double rate_slack = opts.bound_tol * (std::abs(lo_rate) + std::abs(hi_rate));

    double t = 0.0;
    auto record = [&](double dt_used, int iters) {
        const auto [lo, hi] = std::minmax_element(current.u.begin(), current.u.end());
        traj.times.push_back(t);
        traj.radii.push_back(current.R);
        traj.rates.push_back(radius_rate(current, params));
        traj.sup_dev_from_v.push_back(sup_deviation_from_v(current, params, spec));
        traj.dt_used.push_back(dt_used);
        traj.picard_iters.push_back(iters);
        traj.u_min.push_back(*lo);
        traj.u_max.push_back(*hi);
    };
    auto fail = [&](const std::string& what) {
        std::ostringstream os;
        os.precision(17);
        os << what << " at t = " << t << " (R = " << current.R << ")";
        traj.termination = Termination::Failed;
        traj.message = os.str();
    };

    record(0.0, 0);
    auto snap = opts.snapshot_times.begin();
    while (snap != opts.snapshot_times.end() && *snap <= 0.0) {
        traj.snapshots.emplace_back(0.0, current);
        ++snap;
    }

    const std::vector<double> targets = merged_targets(opts, t_end);
    auto target = targets.begin();
    double dt = opts.dt_init;
    while (t < t_end) {
        const bool clipped = t + dt >= *target;
        const double dt_step = clipped ? *target - t : dt;

        StepInfo info;
        try {
            info = step(current, dt_step, params, spec, opts);
        } catch (const NumericalError& e) {
            fail(e.what());
            return traj;
        }
        if (!info.accepted) {
            dt = 0.5 * dt_step;
            if (dt < opts.dt_min * std::max(1.0, t)) {
                fail("time step underflow after repeated Picard rejection");
                return traj;
            }
            continue;
        }

        t = clipped ? *target : t + dt_step;
        current = std::move(info.profile);

        bool at_target = false;
        if (clipped) {
            at_target = true;
            ++target;
        }
        while (snap != opts.snapshot_times.end() && *snap <= t) {
            traj.snapshots.emplace_back(t, current);
            ++snap;
        }

        const auto [lo, hi] = std::minmax_element(current.u.begin(), current.u.end());
        const bool extinct = current.R < opts.extinction_floor;
        const bool stationary = std::abs(info.growth) < opts.stationary_rate;
        if (!opts.record_outputs_only || at_target || extinct || stationary)
            record(dt_step, info.picard_iters);

        if (*lo < -opts.max_principle_tol || *hi > params.sigma_bar + opts.max_principle_tol) {
            std::ostringstream os;
            os.precision(17);
            os << "maximum principle violated: u in [" << *lo << ", " << *hi << "]";
            fail(os.str());
            return traj;
        }
        if (info.growth < lo_rate - rate_slack || info.growth > hi_rate + rate_slack) {
            std::ostringstream os;
            os.precision(17);
            os << "growth-rate bound violated: R'/R = " << info.growth;
            fail(os.str());
            return traj;
        }
        const double env_lo = data.R0 * std::exp(lo_rate * t) * (1.0 - opts.bound_tol);
        const double env_hi = data.R0 * std::exp(hi_rate * t) * (1.0 + opts.bound_tol);
        if (current.R < env_lo || current.R > env_hi) {
            fail("radius envelope violated");
            return traj;
        }

        if (extinct) {
            traj.termination = Termination::Extinction;
            return traj;
        }
        if (stationary) {
            traj.termination = Termination::Stationary;
            return traj;
        }
        dt = std::min(1.2 * dt, opts.dt_max);
    }
    return traj;
}

} // namespace tumorfb
