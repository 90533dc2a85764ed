#include "doctest.h"

#include "oracles.hpp"
#include "tumorfb/error.hpp"
#include "tumorfb/quasi.hpp"

#include <cmath>
#include <random>

using namespace tumorfb;

namespace {

struct Scenario {
    ModelParams params;
    SmoothingSpec spec;
    StationaryLandscape land;
    double rs1 = 0.0, rs2 = 0.0;
};

Scenario make_scenario(double gamma = 0.5, double sigma_tilde = 0.4, double mu = 1.0)
{
    Scenario s;
    s.params.gamma = gamma;
    s.params.sigma_tilde = sigma_tilde;
    s.params.mu = mu;
    s.spec = SmoothingSpec::for_gamma(gamma);
    s.land = find_stationary_radii(sigma_tilde, s.params, s.spec);
    s.rs1 = *s.land.small_root();
    s.rs2 = *s.land.large_root();
    return s;
}

} // namespace

TEST_CASE("quasi-stationary right-hand side")
{
    const auto s = make_scenario();
    CHECK(std::abs(rhs_quasi(s.rs2, s.params, s.spec)) < 1e-9 * s.params.mu * s.rs2);
    CHECK(std::abs(rhs_quasi(s.rs1, s.params, s.spec)) < 1e-9 * s.params.mu * s.rs1);
    for (double R : {0.1, 0.3, 0.5})
        CHECK(rhs_quasi(R, s.params, s.spec) == doctest::Approx(-s.params.mu / 3.0 * s.params.sigma_tilde * R));
    for (double frac : {0.01, 0.3, 0.7, 0.99})
        CHECK(rhs_quasi(s.rs1 + frac * (s.rs2 - s.rs1), s.params, s.spec) > 0.0);
    CHECK(rhs_quasi(1.1 * s.rs2, s.params, s.spec) < 0.0);
    CHECK_THROWS_AS(rhs_quasi(0.0, s.params, s.spec), InvalidArgument);
}

TEST_CASE("integration from the equilibria")
{
    const auto s = make_scenario();
    const auto at_rs2 = integrate_quasi(s.rs2, 100.0, s.params, s.spec);
    CHECK(at_rs2.termination == Termination::Stationary);
    for (double R : at_rs2.radii)
        CHECK(R == s.rs2);
    CHECK(classify_limit(at_rs2, s.land).outcome == Outcome::ConvergesTo);

    // Exactly on the separatrix there is no prediction.
    const auto at_rs1 = integrate_quasi(s.rs1, 100.0, s.params, s.spec);
    CHECK(classify_limit(at_rs1, s.land).outcome == Outcome::Undecided);
}

TEST_CASE("equilibria persist for t = 100 / mu")
{
    const auto s = make_scenario();
    for (double root : {s.rs1, s.rs2}) {
        const auto traj = integrate_quasi(root, 100.0 / s.params.mu, s.params, s.spec);
        for (double R : traj.radii)
            CHECK(std::abs(R - root) < 1e-7 * root);
    }
    // The stable root also holds without the stationarity stop.
    QuasiOptions opts;
    opts.stationary_rate = 0.0;
    const auto traj = integrate_quasi(s.rs2, 100.0 / s.params.mu, s.params, s.spec, opts);
    CHECK(traj.times.back() == 100.0 / s.params.mu);
    for (double R : traj.radii)
        CHECK(std::abs(R - s.rs2) < 1e-7 * s.rs2);
}

TEST_CASE("below R_s1 the radius decays monotonically to the floor")
{
    const auto s = make_scenario();
    const auto traj = integrate_quasi(0.9 * s.rs1, 1e4, s.params, s.spec);
    CHECK(traj.termination == Termination::Extinction);
    CHECK(traj.final_radius() < 1e-8);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        CHECK(traj.radii[i] < traj.radii[i - 1]);
        CHECK(traj.radii[i] > 0.0);
        CHECK(traj.times[i] > traj.times[i - 1]);
    }
    CHECK(classify_limit(traj, s.land).outcome == Outcome::ExtinctionToZero);
}

TEST_CASE("above R_s1 the radius rises monotonically to R_s2")
{
    const auto s = make_scenario();
    const auto traj = integrate_quasi(1.1 * s.rs1, 1e4, s.params, s.spec);
    CHECK(traj.termination == Termination::Stationary);
    CHECK(std::abs(traj.final_radius() - s.rs2) < 1e-6);
    for (std::size_t i = 1; i < traj.size(); ++i)
        CHECK(traj.radii[i] >= traj.radii[i - 1]);
    const auto cls = classify_limit(traj, s.land);
    CHECK(cls.outcome == Outcome::ConvergesTo);
    CHECK(cls.limit == s.rs2);
}

TEST_CASE("truncated run is undecided")
{
    const auto s = make_scenario();
    const auto traj = integrate_quasi(1.5 * s.rs1, 1e-3, s.params, s.spec);
    CHECK(traj.termination == Termination::ReachedEnd);
    CHECK(traj.times.back() == 1e-3);
    CHECK(classify_limit(traj, s.land).outcome == Outcome::Undecided);
}

TEST_CASE("sign of dR/dt follows F - sigma_tilde and no equilibrium is overshot")
{
    const auto s = make_scenario();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.05, 3.0);
    for (int trial = 0; trial < 12; ++trial) {
        const double R0 = dist(rng) * s.rs2;
        const auto traj = integrate_quasi(R0, 2e3, s.params, s.spec);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double R = traj.radii[i];
            const double gap = eval_F(R, s.params, s.spec) - s.params.sigma_tilde;
            if (std::abs(gap) > 1e-9)
                CHECK((traj.rates[i] > 0.0) == (gap > 0.0));
        }
        const double tol = 1e-8 * s.rs2;
        if (R0 > s.rs2)
            for (double R : traj.radii) CHECK(R >= s.rs2 - tol);
        else if (R0 > s.rs1)
            for (double R : traj.radii) CHECK(R <= s.rs2 + tol);
        else
            for (double R : traj.radii) CHECK(R <= s.rs1 + tol);
    }
}

TEST_CASE("supercritical threshold always leads to extinction")
{
    auto s = make_scenario();
    const double theta = s.land.theta_star;
    ModelParams p = s.params;
    p.sigma_tilde = 1.1 * theta;
    const auto land = find_stationary_radii(p.sigma_tilde, p, s.spec);
    CHECK(land.roots.empty());
    for (double R0 : {0.3, 1.0, 2.0, 10.0, 50.0}) {
        const auto traj = integrate_quasi(R0, 1e5, p, s.spec);
        CHECK(classify_limit(traj, land).outcome == Outcome::ExtinctionToZero);
    }
}

TEST_CASE("large initial radii still converge to R_s2")
{
    const auto s = make_scenario();
    for (double factor : {2.0, 5.0, 10.0}) {
        const auto traj = integrate_quasi(factor * s.rs2, 1e4, s.params, s.spec);
        CHECK(classify_limit(traj, s.land).outcome == Outcome::ConvergesTo);
    }
}

TEST_CASE("tightening rtol changes the endpoint by less than 10 rtol")
{
    const auto s = make_scenario();
    for (double rtol : {1e-6, 1e-8}) {
        QuasiOptions coarse, fine;
        coarse.rtol = rtol;
        fine.rtol = 0.5 * rtol;
        const double t_end = 8.0;
        const double a = integrate_quasi(1.3 * s.rs1, t_end, s.params, s.spec, coarse).final_radius();
        const double b = integrate_quasi(1.3 * s.rs1, t_end, s.params, s.spec, fine).final_radius();
        CHECK(std::abs(a - b) < 10.0 * rtol * std::abs(b));
    }
}

TEST_CASE("output times are hit exactly")
{
    const auto s = make_scenario();
    QuasiOptions opts;
    opts.output_times = {0.5, 1.0, 2.5};
    opts.record_outputs_only = true;
    const auto traj = integrate_quasi(2.0, 4.0, s.params, s.spec, opts);
    REQUIRE(traj.size() == 5);
    CHECK(traj.times[1] == 0.5);
    CHECK(traj.times[2] == 1.0);
    CHECK(traj.times[3] == 2.5);
    CHECK(traj.times[4] == 4.0);
    const auto direct = integrate_quasi(2.0, 2.5, s.params, s.spec);
    CHECK(direct.final_radius() == doctest::Approx(traj.radii[3]).epsilon(1e-8));
}

TEST_CASE("linearised convergence rate at R_s2")
{
    for (double mu : {1.0, 2.0}) {
        const auto s = make_scenario(0.5, 0.4, mu);
        const double expected = mu / 3.0 * oracle::F_slope(s.rs2, 0.5) * s.rs2;
        CHECK(expected < 0.0);
        for (double factor : {1.05, 0.95}) {
            const auto traj = integrate_quasi(factor * s.rs2, 1e3, s.params, s.spec);
            const double rate = measure_linear_rate(traj, s.rs2);
            CHECK(rate == doctest::Approx(expected).epsilon(0.05));
        }
    }
    const auto one = make_scenario(0.5, 0.4, 1.0);
    const auto two = make_scenario(0.5, 0.4, 2.0);
    const double r1 = measure_linear_rate(integrate_quasi(1.05 * one.rs2, 1e3, one.params, one.spec), one.rs2);
    const double r2 = measure_linear_rate(integrate_quasi(1.05 * two.rs2, 1e3, two.params, two.spec), two.rs2);
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("rate fit needs a long enough window")
{
    const auto s = make_scenario();
    const auto traj = integrate_quasi(1.05 * s.rs2, 0.5, s.params, s.spec);
    CHECK_THROWS_AS(measure_linear_rate(traj, s.rs2), NumericalError);
}

TEST_CASE("input validation")
{
    const auto s = make_scenario();
    CHECK_THROWS_AS(integrate_quasi(0.0, 1.0, s.params, s.spec), InvalidArgument);
    CHECK_THROWS_AS(integrate_quasi(1.0, 0.0, s.params, s.spec), InvalidArgument);
}
