#include "doctest.h"

#include "tumorfb/error.hpp"
#include "tumorfb/full_solver.hpp"
#include "tumorfb/quasi.hpp"
#include "tumorfb/stationary.hpp"

#include <algorithm>
#include <cmath>

using namespace tumorfb;

namespace {

struct Setup {
    ModelParams params;
    SmoothingSpec spec;
    double rs1 = 0.0, rs2 = 0.0;
};

Setup make_setup(double c, double sigma_tilde = 0.4)
{
    Setup s;
    s.params.gamma = 0.5;
    s.params.sigma_tilde = sigma_tilde;
    s.params.c = c;
    s.spec = SmoothingSpec::for_gamma(0.5);
    const auto land = find_stationary_radii(sigma_tilde, s.params, s.spec);
    if (land.roots.size() == 2) {
        s.rs1 = *land.small_root();
        s.rs2 = *land.large_root();
    }
    return s;
}

RadialProfile constant_profile(double value, double R, std::size_t n)
{
    return RadialProfile{std::vector<double>(n, value), R};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double final_radius(const InitialData& data, double t_end, const Setup& s, std::size_t n, double dt,
                    TimeScheme scheme)
{
    SolverOpts o;
    o.n_grid = n;
    o.dt_init = dt;
    o.dt_max = dt;
    o.scheme = scheme;
    o.picard_tol = 1e-13;
    o.picard_max = 30;
    o.record_outputs_only = true;
    const auto traj = simulate_full(data, t_end, s.params, s.spec, o);
    REQUIRE(traj.termination == Termination::ReachedEnd);
    return traj.final_radius();
}

} // namespace

TEST_CASE("radius_rate examples")
{
    const auto s = make_setup(0.01);
    const double R = 3.0;
    CHECK(std::abs(radius_rate(constant_profile(s.params.sigma_tilde, R, 201), s.params)) < 1e-15);
    const double upper = s.params.mu * R * (s.params.sigma_bar - s.params.sigma_tilde) / 3.0;
    CHECK(radius_rate(constant_profile(s.params.sigma_bar, R, 201), s.params) == doctest::Approx(upper).epsilon(1e-14));

    const auto prof = stationary_solution(s.rs2, s.params, s.spec, 201);
    CHECK(std::abs(radius_rate(prof, s.params)) < 1e-6 * s.params.mu * s.rs2);
    CHECK_THROWS_AS(radius_rate(constant_profile(0.5, R, 200), s.params), InvalidArgument);
}

TEST_CASE("sup_deviation_from_v examples")
{
    const auto s = make_setup(0.01);
    const auto v = InitialData::comparison_profile(3.0, 201, s.params, s.spec);
    CHECK(sup_deviation_from_v(RadialProfile{v.sigma0, v.R0}, s.params, s.spec) < 1e-15);
    const auto st = stationary_solution(s.rs2, s.params, s.spec, 201);
    CHECK(sup_deviation_from_v(st, s.params, s.spec) < 1e-15);

    const auto q = InitialData::quadratic_compatible(3.0, 201, s.params, s.spec);
    SolverOpts o;
    o.snapshot_times = {0.5};
    const auto traj = simulate_full(q, 0.5, s.params, s.spec, o);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(sup_deviation_from_v(traj.snapshots[0].second, s.params, s.spec) > 0.0);
}

TEST_CASE("stationary state persists for 1000 steps")
{
    const auto s = make_setup(0.01);
    SolverOpts o;
    auto prof = stationary_solution(s.rs2, s.params, s.spec, o.n_grid);
    const auto exact = prof.u;
    for (int k = 0; k < 1000; ++k) {
        auto info = step(prof, 1e-3, s.params, s.spec, o);
        REQUIRE(info.accepted);
        prof = std::move(info.profile);
    }
    CHECK(std::abs(prof.R - s.rs2) < 1e-5 * s.rs2);
    const auto closed_form = stationary_solution(s.rs2, s.params, s.spec, o.n_grid);
    CHECK(max_abs_diff(prof.u, closed_form.u) < 1e-4);
    CHECK(max_abs_diff(exact, closed_form.u) == 0.0);
}

TEST_CASE("boundary value is G of the new radius")
{
    const auto s = make_setup(0.01);
    auto prof = InitialData::quadratic_compatible(2.0, 101, s.params, s.spec);
    SolverOpts o;
    o.n_grid = 101;
    const auto info = step(RadialProfile{prof.sigma0, prof.R0}, 1e-2, s.params, s.spec, o);
    REQUIRE(info.accepted);
    CHECK(info.profile.R != prof.R0);
    CHECK(info.profile.u.back() == eval_G(info.profile.R, s.params, s.spec));
    CHECK(info.profile.R == doctest::Approx(prof.R0 * std::exp(1e-2 * info.growth)).epsilon(1e-14));
}

TEST_CASE("zero interior layer stays non-negative")
{
    const auto s = make_setup(0.01);
    SolverOpts o;
    for (auto scheme : {TimeScheme::BackwardEuler, TimeScheme::CrankNicolson}) {
        o.scheme = scheme;
        RadialProfile prof = constant_profile(0.0, 4.0, o.n_grid);
        prof.u.back() = eval_G(prof.R, s.params, s.spec);
        for (int k = 0; k < 50; ++k) {
            auto info = step(prof, 1e-3, s.params, s.spec, o);
            REQUIRE(info.accepted);
            prof = std::move(info.profile);
            CHECK(*std::min_element(prof.u.begin(), prof.u.end()) >= -1e-8);
        }
    }
}

TEST_CASE("very large c freezes the profile")
{
    const auto s = make_setup(1e6);
    const auto data = InitialData::quartic_blend(3.0, 0.1, 201, s.params, s.spec);
    const RadialProfile prof{data.sigma0, data.R0};
    const auto info = step(prof, 1e-4, s.params, s.spec, SolverOpts{});
    REQUIRE(info.accepted);
    // dt (lambda + |A|) / c with |A| ~ 4 / (h R)^2 relative to max |u|.
    const double h = prof.h();
    const double bound = 1e-4 * (s.params.lambda + 4.0 / (h * h * prof.R * prof.R)) / s.params.c;
    CHECK(max_abs_diff(info.profile.u, prof.u) < bound);
}

TEST_CASE("a single Picard sweep rejects a coarse step")
{
    const auto s = make_setup(0.01);
    const auto data = InitialData::quadratic_compatible(3.0, 201, s.params, s.spec);
    SolverOpts o;
    o.picard_max = 1;
    const auto info = step(RadialProfile{data.sigma0, data.R0}, 0.5, s.params, s.spec, o);
    CHECK_FALSE(info.accepted);
    CHECK(info.picard_iters == 1);
    // The adaptive driver recovers by halving.
    const auto traj = simulate_full(data, 1.0, s.params, s.spec, o);
    CHECK(traj.termination == Termination::ReachedEnd);
}

TEST_CASE("a-priori bounds hold for three initial-data families")
{
    const auto s = make_setup(0.01);
    const InitialData families[] = {
        InitialData::quadratic_compatible(3.0, 201, s.params, s.spec),
        InitialData::comparison_profile(0.7, 201, s.params, s.spec),
        InitialData::quartic_blend(8.0, 0.9, 201, s.params, s.spec),
    };
    for (const auto& data : families) {
        const auto traj = simulate_full(data, 5.0, s.params, s.spec);
        CHECK_MESSAGE(traj.termination != Termination::Failed, traj.message);
        REQUIRE(traj.has_diagnostics());
        CHECK(traj.size() == traj.u_min.size());
        const double lo = -s.params.mu * s.params.sigma_tilde / 3.0;
        const double hi = s.params.mu * (s.params.sigma_bar - s.params.sigma_tilde) / 3.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            CHECK(traj.u_min[i] >= -1e-8);
            CHECK(traj.u_max[i] <= s.params.sigma_bar + 1e-8);
            const double t = traj.times[i];
            CHECK(traj.radii[i] >= data.R0 * std::exp(lo * t) * (1.0 - 1e-6));
            CHECK(traj.radii[i] <= data.R0 * std::exp(hi * t) * (1.0 + 1e-6));
            if (i > 0) {
                const double slope = std::log(traj.radii[i] / traj.radii[i - 1]) / (t - traj.times[i - 1]);
                CHECK(slope >= lo - 1e-6);
                CHECK(slope <= hi + 1e-6);
            }
        }
    }
}

TEST_CASE("threshold above sigma_bar drives extinction")
{
    auto s = make_setup(0.1, 1.2);
    const auto data = InitialData::quadratic_compatible(2.0, 201, s.params, s.spec);
    const auto traj = simulate_full(data, 400.0, s.params, s.spec);
    CHECK(traj.termination == Termination::Extinction);
    const double hi = s.params.mu * (s.params.sigma_bar - s.params.sigma_tilde) / 3.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        CHECK(traj.radii[i] <= data.R0 * std::exp(hi * traj.times[i]) * (1.0 + 1e-6));
}

TEST_CASE("small c converges to R_s2 from inside the basin")
{
    const auto s = make_setup(1e-3);
    const double R0 = 0.5 * (s.rs1 + s.rs2);
    const auto data = InitialData::comparison_profile(R0, 201, s.params, s.spec);
    const auto traj = simulate_full(data, 200.0, s.params, s.spec);
    CHECK(traj.termination != Termination::Failed);
    CHECK(std::abs(traj.final_radius() - s.rs2) < 1e-3);
}

TEST_CASE("full and quasi-stationary radii differ by O(c)")
{
    const double R0 = 3.0;
    const double t_end = 10.0;
    double previous = 0.0;
    for (double c : {1e-2, 1e-3}) {
        const auto s = make_setup(c);
        // Backward Euler at dt_max >> c would add an O(dt) error on top.
        SolverOpts o;
        o.scheme = TimeScheme::CrankNicolson;
        for (int k = 1; k <= 100; ++k) o.output_times.push_back(0.1 * k);
        o.output_times.pop_back();
        o.record_outputs_only = true;
        const auto full = simulate_full(InitialData::comparison_profile(R0, 201, s.params, s.spec), t_end,
                                        s.params, s.spec, o);
        REQUIRE(full.termination == Termination::ReachedEnd);
        QuasiOptions q;
        q.output_times = o.output_times;
        q.record_outputs_only = true;
        const auto quasi = integrate_quasi(R0, t_end, s.params, s.spec, q);
        REQUIRE(quasi.size() == full.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i) {
            REQUIRE(quasi.times[i] == full.times[i]);
            worst = std::max(worst, std::abs(full.radii[i] - quasi.radii[i]));
        }
        CHECK(worst < c);
        if (previous > 0.0)
            CHECK(worst < 0.2 * previous);
        previous = worst;
    }
}

TEST_CASE("spatial and temporal convergence orders")
{
    const auto s = make_setup(0.1);
    const auto data = InitialData::comparison_profile(3.0, 801, s.params, s.spec);
    const double T = 2.0;

    const double ref = final_radius(data, T, s, 801, 1e-3, TimeScheme::CrankNicolson);
    const double e101 = final_radius(data, T, s, 101, 1e-3, TimeScheme::CrankNicolson) - ref;
    const double e201 = final_radius(data, T, s, 201, 1e-3, TimeScheme::CrankNicolson) - ref;
    const double spatial = e101 / e201;
    CHECK(spatial >= 3.5);
    CHECK(spatial <= 4.5);

    const double be[3] = {final_radius(data, T, s, 201, 0.04, TimeScheme::BackwardEuler),
                          final_radius(data, T, s, 201, 0.02, TimeScheme::BackwardEuler),
                          final_radius(data, T, s, 201, 0.01, TimeScheme::BackwardEuler)};
    const double be_ratio = (be[0] - be[1]) / (be[1] - be[2]);
    CHECK(be_ratio == doctest::Approx(2.0).epsilon(0.1));

    const double cn[3] = {final_radius(data, T, s, 201, 0.04, TimeScheme::CrankNicolson),
                          final_radius(data, T, s, 201, 0.02, TimeScheme::CrankNicolson),
                          final_radius(data, T, s, 201, 0.01, TimeScheme::CrankNicolson)};
    const double cn_ratio = (cn[0] - cn[1]) / (cn[1] - cn[2]);
    CHECK(cn_ratio == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("snapshots and output times are hit exactly")
{
    const auto s = make_setup(0.01);
    const auto data = InitialData::quadratic_compatible(3.0, 201, s.params, s.spec);
    SolverOpts o;
    o.snapshot_times = {0.0, 0.25, 1.0};
    o.output_times = {0.5};
    o.record_outputs_only = true;
    const auto traj = simulate_full(data, 1.5, s.params, s.spec, o);
    REQUIRE(traj.snapshots.size() == 3);
    CHECK(traj.snapshots[0].first == 0.0);
    CHECK(traj.snapshots[1].first == 0.25);
    CHECK(traj.snapshots[2].first == 1.0);
    REQUIRE(traj.size() == 5);
    CHECK(traj.times[1] == 0.25);
    CHECK(traj.times[2] == 0.5);
    CHECK(traj.times[3] == 1.0);
    CHECK(traj.times[4] == 1.5);
    for (const auto& [t, prof] : traj.snapshots)
        CHECK(prof.u.back() == eval_G(prof.R, s.params, s.spec));
}

TEST_CASE("solver input validation")
{
    const auto s = make_setup(0.01);
    const auto data = InitialData::quadratic_compatible(3.0, 201, s.params, s.spec);
    SolverOpts even;
    even.n_grid = 200;
    CHECK_THROWS_AS(simulate_full(data, 1.0, s.params, s.spec, even), InvalidArgument);
    SolverOpts small;
    small.n_grid = 15;
    CHECK_THROWS_AS(small.validate(), InvalidArgument);
    SolverOpts steps;
    steps.dt_init = 1.0;
    steps.dt_max = 0.1;
    CHECK_THROWS_AS(steps.validate(), InvalidArgument);

    ModelParams quasi = s.params;
    quasi.c = 0.0;
    CHECK_THROWS_AS(simulate_full(data, 1.0, quasi, s.spec), InvalidArgument);
    CHECK_THROWS_AS(step(RadialProfile{data.sigma0, data.R0}, 1e-3, quasi, s.spec, SolverOpts{}), InvalidArgument);
    CHECK_THROWS_AS(step(RadialProfile{data.sigma0, data.R0}, 0.0, s.params, s.spec, SolverOpts{}), InvalidArgument);

    auto bad = data;
    bad.sigma0.back() += 1e-3;
    CHECK_THROWS_AS(simulate_full(bad, 1.0, s.params, s.spec), InvalidArgument);
    CHECK_THROWS_AS(simulate_full(data, 0.0, s.params, s.spec), InvalidArgument);

    CHECK(time_scheme_from_string("crank_nicolson") == TimeScheme::CrankNicolson);
    CHECK_THROWS_AS(time_scheme_from_string("rk4"), InvalidArgument);
}
