#include "tumorfb/verification.hpp"

#include "tumorfb/error.hpp"
#include "tumorfb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tumorfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

Check make_check(std::string name, std::string anchor)
{
    Check c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    return c;
}

// Status and details for a worst-case slack; slack >= 0 passes.
void settle(Check& check, double slack, double t_worst, double value_worst, const std::string& what)
{
    check.measured_margin = slack;
    check.status = slack >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    std::ostringstream os;
    os.precision(10);
    if (check.status == CheckStatus::Fail)
        os << "violated at t = " << t_worst << ": " << what << " = " << value_worst;
    else
        os << "worst " << what << " = " << value_worst << " at t = " << t_worst;
    check.details = os.str();
}

struct Extremes {
    double lo = kInf, hi = -kInf;
};

Extremes profile_extremes(const std::vector<double>& u)
{
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    return {*lo, *hi};
}

Extremes comparison_extremes(double R, const ModelParams& params, const SmoothingSpec& spec)
{
    Extremes e;
    constexpr int kSamples = 33;
    for (int i = 0; i < kSamples; ++i) {
        const double r = R * static_cast<double>(i) / (kSamples - 1);
        const double v = eval_comparison_profile_v(std::min(r, R), R, params, spec);
        e.lo = std::min(e.lo, v);
        e.hi = std::max(e.hi, v);
    }
    return e;
}

enum class Prediction { Extinction, Converges, None };

struct Run {
    std::size_t case_index = 0;
    OutcomeCase oc;
    Prediction predicted = Prediction::None;
    std::string reason;
    std::optional<double> rs2;
};

std::string describe(const OutcomeCase& oc)
{
    std::ostringstream os;
    os.precision(10);
    os << "R0=" << oc.R0 << " sigma_tilde=" << oc.sigma_tilde << " c=" << oc.c;
    return os.str();
}

void predict(Run& run, const StationaryLandscape& land, const ModelParams& params, const MatrixOptions& opts)
{
    const auto& oc = run.oc;
    if (oc.sigma_tilde > params.sigma_bar) {
        run.predicted = Prediction::Extinction;
        run.reason = "sigma_tilde > sigma_bar gives extinction for every c";
        return;
    }
    const bool degenerate = land.roots.size() == 1;
    if (oc.c > opts.small_c) {
        run.reason = "no prediction: c is not small and sigma_tilde <= sigma_bar";
        return;
    }
    if (land.roots.empty()) {
        run.predicted = Prediction::Extinction;
        run.reason = oc.c == 0.0 ? "sigma_tilde > theta_*: no stationary radius, extinction"
                                 : "theta_* < sigma_tilde <= sigma_bar at small c gives extinction";
        return;
    }
    if (degenerate) {
        run.reason = "no prediction: sigma_tilde = theta_* (degenerate root)";
        return;
    }
    const double rs1 = *land.small_root();
    const double rs2 = *land.large_root();
    run.rs2 = rs2;
    if (oc.c == 0.0) {
        if (oc.R0 < rs1) {
            run.predicted = Prediction::Extinction;
            run.reason = "R0 < R_s1 at c = 0 gives extinction";
        } else if (oc.R0 > rs1) {
            run.predicted = Prediction::Converges;
            run.reason = "R0 > R_s1 at c = 0 converges to R_s2";
        } else {
            run.reason = "no prediction: R0 = R_s1";
        }
        return;
    }
    const double eps = basin_margin(rs1, rs2);
    if (oc.R0 <= rs1 - eps) {
        run.predicted = Prediction::Extinction;
        run.reason = "R0 <= R_s1 - eps at small c gives extinction (eps = " + format(eps) + ")";
    } else if (oc.R0 > rs1 + eps && oc.R0 < 1.0 / eps) {
        run.predicted = Prediction::Converges;
        run.reason = "R_s1 + eps < R0 < 1/eps at small c converges to R_s2 (eps = " + format(eps) + ")";
    } else {
        run.reason = "no prediction: R0 outside both basins (eps = " + format(eps) + ")";
    }
}

double final_radius_at(const InitialData& data, double t_end, const ModelParams& params, const SmoothingSpec& spec,
                       const SolverOpts& opts, std::string& message)
{
    const auto traj = simulate_full(data, t_end, params, spec, opts);
    if (traj.termination != Termination::ReachedEnd) {
        message = "run stopped early (" + std::string(to_string(traj.termination)) + ") " + traj.message;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return traj.final_radius();
}

Check ratio_check(std::string name, std::string anchor, double ratio, double lo, double hi)
{
    Check c = make_check(std::move(name), std::move(anchor));
    if (!std::isfinite(ratio)) {
        c.status = CheckStatus::Fail;
        c.measured_margin = -kInf;
        c.details = "ratio is not finite";
        return c;
    }
    c.measured_margin = std::min(ratio - lo, hi - ratio);
    c.status = c.measured_margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    c.details = "ratio " + format(ratio) + ", accepted band [" + format(lo) + ", " + format(hi) + "]";
    return c;
}

} // namespace

std::string_view to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    }
    return "skipped";
}

bool VerificationReport::any_failed() const
{
    return count(CheckStatus::Fail) > 0;
}

std::size_t VerificationReport::count(CheckStatus s) const
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [s](const Check& c) { return c.status == s; }));
}

void VerificationReport::append(const VerificationReport& other)
{
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

VerificationReport audit_bounds(const Trajectory& traj, const ModelParams& params)
{
    VerificationReport report;
    Check mp = make_check("max_principle", "0 <= sigma <= sigma_bar");
    Check rate = make_check("growth_rate_bounds", "-mu sigma_tilde / 3 <= R'/R <= mu (sigma_bar - sigma_tilde) / 3");
    Check env = make_check("radius_envelope",
                           "R0 exp(-mu sigma_tilde t / 3) <= R(t) <= R0 exp(mu (sigma_bar - sigma_tilde) t / 3)");
    if (traj.empty()) {
        for (Check* c : {&mp, &rate, &env}) {
            c->details = "empty trajectory";
            report.checks.push_back(*c);
        }
        return report;
    }

    const double tol_u = kAuditTolerance * params.sigma_bar;
    double worst = kInf, t_worst = 0.0, v_worst = 0.0;
    auto visit = [&](double t, const Extremes& e) {
        const double slack_lo = e.lo + tol_u;
        const double slack_hi = params.sigma_bar + tol_u - e.hi;
        if (slack_lo < worst) {
            worst = slack_lo;
            t_worst = t;
            v_worst = e.lo;
        }
        if (slack_hi < worst) {
            worst = slack_hi;
            t_worst = t;
            v_worst = e.hi;
        }
    };
    if (traj.integrator == Integrator::FullSolver && !traj.u_min.empty()) {
        for (std::size_t i = 0; i < traj.size(); ++i)
            visit(traj.times[i], Extremes{traj.u_min[i], traj.u_max[i]});
        for (const auto& [t, prof] : traj.snapshots)
            visit(t, profile_extremes(prof.u));
    } else {
        for (std::size_t i = 0; i < traj.size(); ++i)
            visit(traj.times[i], comparison_extremes(traj.radii[i], params, traj.spec));
    }
    settle(mp, worst, t_worst, v_worst, "u");
    if (traj.integrator == Integrator::QuasiStationary)
        mp.details += " (comparison profiles v)";
    report.checks.push_back(mp);

    const double lo = -params.mu * params.sigma_tilde / 3.0;
    const double hi = params.mu * (params.sigma_bar - params.sigma_tilde) / 3.0;

    worst = kInf;
    t_worst = v_worst = 0.0;
    std::size_t intervals = 0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        if (!(dt > 0.0)) continue;
        ++intervals;
        const double slope = std::log(traj.radii[i] / traj.radii[i - 1]) / dt;
        const double slack = std::min(slope - lo, hi - slope) + kAuditTolerance;
        if (!(slack >= worst)) {
            worst = slack;
            t_worst = traj.times[i];
            v_worst = slope;
        }
    }
    if (intervals == 0) {
        rate.details = "single sample, no consecutive radii";
        report.checks.push_back(rate);
    } else {
        settle(rate, worst, t_worst, v_worst, "log-slope");
        report.checks.push_back(rate);
    }

    worst = kInf;
    t_worst = v_worst = 0.0;
    const double R0 = traj.radii.front();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const double R = traj.radii[i];
        const double env_lo = R0 * std::exp(lo * t);
        const double env_hi = R0 * std::exp(hi * t);
        const double slack = std::min((R - env_lo) / env_lo, (env_hi - R) / env_hi) + kAuditTolerance;
        if (!(slack >= worst)) {
            worst = slack;
            t_worst = t;
            v_worst = R;
        }
    }
    settle(env, worst, t_worst, v_worst, "R");
    report.checks.push_back(env);
    return report;
}

ScalingStudy run_scaling_study(double R0, double t_end, const std::vector<double>& c_values,
                               const ModelParams& params, const SmoothingSpec& spec, const SolverOpts& opts,
                               std::size_t n_samples, unsigned threads)
{
    if (c_values.empty())
        throw InvalidArgument("scaling study needs at least one c value");
    for (std::size_t i = 0; i < c_values.size(); ++i) {
        if (!(c_values[i] > 0.0))
            throw InvalidArgument("scaling study needs c > 0");
        if (i > 0 && !(c_values[i] < c_values[i - 1]))
            throw InvalidArgument("scaling study c values must be strictly decreasing");
    }
    if (n_samples < 2)
        throw InvalidArgument("scaling study needs at least two sample times");
    if (!(R0 > 0.0))
        throw InvalidArgument("scaling study needs R0 > 0");
    opts.validate();

    ScalingStudy study;
    study.c_values = c_values;
    for (double c : c_values)
        study.transient_end = std::max(study.transient_end, 10.0 * c * std::abs(std::log(c)));
    if (!(study.transient_end < t_end))
        throw InvalidArgument("t_end must lie past the transient window 10 c |log c| = " +
                              format(study.transient_end));

    std::vector<double> samples(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k)
        samples[k] = study.transient_end +
                     (t_end - study.transient_end) * static_cast<double>(k + 1) / static_cast<double>(n_samples);
    samples.back() = t_end;

    const std::size_t m = c_values.size();
    study.deviations.assign(m, {});
    study.max_deviation.assign(m, 0.0);
    study.skipped.assign(m, false);
    study.messages.assign(m, "");

    parallel_for(m, threads, [&](std::size_t i) {
        ModelParams p = params;
        p.c = c_values[i];
        SolverOpts o = opts;
        o.output_times.assign(samples.begin(), samples.end() - 1);
        o.snapshot_times.clear();
        o.record_outputs_only = true;
        try {
            const auto data = InitialData::comparison_profile(R0, o.n_grid, p, spec);
            const auto traj = simulate_full(data, t_end, p, spec, o);
            if (traj.termination != Termination::ReachedEnd) {
                study.skipped[i] = true;
                study.messages[i] =
                    "run stopped early (" + std::string(to_string(traj.termination)) + ") " + traj.message;
                return;
            }
            for (std::size_t k = 0; k < traj.size(); ++k) {
                if (traj.times[k] <= study.transient_end) continue;
                study.deviations[i].emplace_back(traj.times[k], traj.sup_dev_from_v[k]);
                study.max_deviation[i] = std::max(study.max_deviation[i], traj.sup_dev_from_v[k]);
            }
            if (study.deviations[i].size() != n_samples) {
                study.skipped[i] = true;
                study.messages[i] = "sample times were not all recorded";
            }
        } catch (const std::exception& e) {
            study.skipped[i] = true;
            study.messages[i] = e.what();
        }
    });

    double num = 0.0, den = 0.0;
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < m; ++i) {
        if (study.skipped[i]) continue;
        num += c_values[i] * study.max_deviation[i];
        den += c_values[i] * c_values[i];
        if (prev) study.ratios.push_back(study.max_deviation[*prev] / study.max_deviation[i]);
        prev = i;
    }
    if (den > 0.0) {
        study.fit.slope_vs_c = num / den;
        for (std::size_t i = 0; i < m; ++i) {
            if (study.skipped[i]) continue;
            const double d = study.max_deviation[i];
            const double r = d > 0.0 ? std::abs(d - study.fit.slope_vs_c * c_values[i]) / d : kInf;
            study.fit.residual = std::max(study.fit.residual, r);
        }
    }
    return study;
}

VerificationReport judge_scaling(const ScalingStudy& study)
{
    VerificationReport report;
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < study.c_values.size(); ++i)
        if (!study.skipped[i]) usable.push_back(i);
    std::string skipped_note;
    for (std::size_t i = 0; i < study.c_values.size(); ++i)
        if (study.skipped[i])
            skipped_note += "; c = " + format(study.c_values[i]) + " skipped: " + study.messages[i];

    Check slope = make_check("scaling_slope", "post-transient sup|sigma - v| grows linearly in c");
    Check halving = make_check("scaling_ratio", "halving c halves the post-transient deviation");
    Check residual = make_check("scaling_fit_residual", "deviation is fit by slope * c");
    if (usable.size() < 2) {
        for (Check* c : {&slope, &halving, &residual}) {
            c->details = "fewer than two usable c values" + skipped_note;
            report.checks.push_back(*c);
        }
        return report;
    }

    const double a = study.fit.slope_vs_c;
    slope.measured_margin = a;
    slope.status = (a > 0.0 && std::isfinite(a)) ? CheckStatus::Pass : CheckStatus::Fail;
    slope.details = "slope " + format(a) + skipped_note;
    report.checks.push_back(slope);

    // Ratios are normalised by the c ratio so that the band [1.6, 2.4]
    // for a halving becomes [0.8, 1.2] times the c ratio.
    double worst = kInf;
    std::string listing;
    for (std::size_t k = 1; k < usable.size(); ++k) {
        const std::size_t i = usable[k - 1], j = usable[k];
        const double expected = study.c_values[i] / study.c_values[j];
        const double ratio = study.max_deviation[i] / study.max_deviation[j];
        const double normalised = 2.0 * ratio / expected;
        worst = std::min(worst, std::min(normalised - 1.6, 2.4 - normalised));
        if (!std::isfinite(normalised)) worst = -kInf;
        listing += (listing.empty() ? "" : ", ") + format(ratio);
    }
    halving.measured_margin = worst;
    halving.status = worst >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    halving.details = "ratios [" + listing + "], accepted band [1.6, 2.4] per halving" + skipped_note;
    report.checks.push_back(halving);

    residual.measured_margin = 0.2 - study.fit.residual;
    residual.status = study.fit.residual < 0.2 ? CheckStatus::Pass : CheckStatus::Fail;
    residual.details = "max relative residual " + format(study.fit.residual) + ", limit 0.2" + skipped_note;
    report.checks.push_back(residual);
    return report;
}

double basin_margin(double rs1, double rs2)
{
    return std::min(0.05 * (rs2 - rs1), 0.1 / rs2);
}

std::vector<double> expanded_c_values(const OutcomeCase& oc, const ModelParams& params)
{
    if (!(oc.sigma_tilde > params.sigma_bar))
        return {oc.c};
    std::vector<double> out{1e-3, 1e-1, 1.0, 10.0};
    if (std::find(out.begin(), out.end(), oc.c) == out.end())
        out.insert(out.begin(), oc.c);
    return out;
}

VerificationReport outcome_matrix(const std::vector<OutcomeCase>& cases, const ModelParams& params_base,
                                  const SmoothingSpec& spec, const MatrixOptions& opts, unsigned threads)
{
    params_base.validate();
    if (!params_base.is_scaled())
        throw InvalidArgument("outcome_matrix expects scaled parameters (lambda = sigma_bar = 1)");
    opts.solver.validate();
    if (!(opts.t_end > 0.0))
        throw InvalidArgument("outcome_matrix needs t_end > 0");

    std::vector<Run> runs;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& oc = cases[k];
        if (!(oc.R0 > 0.0) || !(oc.sigma_tilde > 0.0) || !(oc.c >= 0.0) || !std::isfinite(oc.c))
            throw InvalidArgument("outcome case " + std::to_string(k) + " is malformed (" + describe(oc) + ")");
        ModelParams p = params_base;
        p.sigma_tilde = oc.sigma_tilde;
        const auto land = find_stationary_radii(oc.sigma_tilde, p, spec);
        for (double c : expanded_c_values(oc, params_base)) {
            Run run;
            run.case_index = k;
            run.oc = oc;
            run.oc.c = c;
            predict(run, land, p, opts);
            runs.push_back(std::move(run));
        }
    }

    VerificationReport report;
    report.checks.resize(runs.size());
    parallel_for(runs.size(), threads, [&](std::size_t i) {
        const Run& run = runs[i];
        Check& check = report.checks[i];
        check.name = "outcome[" + std::to_string(run.case_index) + "] " + describe(run.oc);
        check.anchor = run.reason;
        if (run.predicted == Prediction::None) {
            check.status = CheckStatus::Skipped;
            check.details = "no prediction";
            return;
        }
        ModelParams p = params_base;
        p.sigma_tilde = run.oc.sigma_tilde;
        p.c = run.oc.c;
        const StationaryLandscape land = [&] {
            try {
                return find_stationary_radii(p.sigma_tilde, p, spec);
            } catch (const std::exception&) {
                return StationaryLandscape{};
            }
        }();
        Trajectory traj;
        ClassifyOptions cls_opts;
        try {
            if (run.oc.c == 0.0) {
                traj = integrate_quasi(run.oc.R0, opts.t_end, p, spec, opts.quasi);
                cls_opts.extinction_floor = opts.quasi.extinction_floor;
            } else {
                SolverOpts so = opts.solver;
                so.record_outputs_only = true;
                const auto data = InitialData::comparison_profile(run.oc.R0, opts.data_samples, p, spec);
                traj = simulate_full(data, opts.t_end, p, spec, so);
                cls_opts.tol_conv = opts.tol_conv_full;
                cls_opts.extinction_floor = so.extinction_floor;
            }
        } catch (const std::exception& e) {
            check.status = CheckStatus::Skipped;
            check.details = std::string("simulation failed: ") + e.what();
            return;
        }
        if (traj.termination == Termination::Failed) {
            check.status = CheckStatus::Skipped;
            check.details = "simulation failed: " + traj.message;
            return;
        }
        const auto cls = classify_limit(traj, land, cls_opts);
        std::ostringstream os;
        os.precision(10);
        os << "predicted " << (run.predicted == Prediction::Extinction ? "extinction" : "converges")
           << ", observed " << to_string(cls.outcome) << " (R = " << cls.final_radius << " at t = "
           << traj.times.back() << ", termination " << to_string(traj.termination) << ")";
        if (run.predicted == Prediction::Extinction) {
            check.status = cls.outcome == Outcome::ExtinctionToZero ? CheckStatus::Pass : CheckStatus::Fail;
            check.measured_margin = 1.0 - cls.final_radius / cls_opts.extinction_floor;
        } else {
            check.status = cls.outcome == Outcome::ConvergesTo ? CheckStatus::Pass : CheckStatus::Fail;
            check.measured_margin = cls_opts.tol_conv - std::abs(cls.final_radius - *run.rs2);
            os << ", R_s2 = " << *run.rs2;
        }
        check.details = os.str();
    });
    return report;
}

VerificationReport audit_gamma_monotonicity(const BifurcationScan& scan)
{
    VerificationReport report;
    Check theta = make_check("theta_star_decreasing", "theta_* decreases with gamma");
    Check small = make_check("R_s1_increasing", "R_s1 increases with gamma");
    Check large = make_check("R_s2_decreasing", "R_s2 decreases with gamma");
    if (scan.axis != ScanAxis::Gamma) {
        for (Check* c : {&theta, &small, &large}) {
            c->details = "scan is not over gamma";
            report.checks.push_back(*c);
        }
        return report;
    }

    struct Series {
        std::vector<double> x, y;
    };
    Series th, r1, r2;
    std::size_t failed = 0, missing_roots = 0;
    for (const auto& s : scan.samples) {
        if (!s.landscape) {
            ++failed;
            continue;
        }
        th.x.push_back(s.value);
        th.y.push_back(s.landscape->theta_star);
        if (s.landscape->roots.size() == 2) {
            r1.x.push_back(s.value);
            r1.y.push_back(*s.landscape->small_root());
            r2.x.push_back(s.value);
            r2.y.push_back(*s.landscape->large_root());
        } else {
            ++missing_roots;
        }
    }

    auto judge = [](Check& check, const Series& s, double sign, const std::string& note) {
        double worst = kInf;
        std::optional<std::size_t> first_bad;
        for (std::size_t i = 1; i < s.y.size(); ++i) {
            const double step = sign * (s.y[i] - s.y[i - 1]);
            if (!(step > 0.0) && !first_bad) first_bad = i;
            worst = std::min(worst, step);
        }
        std::ostringstream os;
        os.precision(12);
        if (s.y.size() < 2) {
            check.status = CheckStatus::Pass;
            check.measured_margin = 0.0;
            os << "fewer than two points, trivially monotone";
        } else if (first_bad) {
            check.status = CheckStatus::Fail;
            check.measured_margin = worst;
            os << "first violation between gamma = " << s.x[*first_bad - 1] << " and " << s.x[*first_bad] << ": "
               << s.y[*first_bad - 1] << " -> " << s.y[*first_bad];
        } else {
            check.status = CheckStatus::Pass;
            check.measured_margin = worst;
            os << s.y.size() << " points, smallest step " << worst;
        }
        check.details = os.str() + note;
    };

    std::string note;
    if (failed > 0) note += "; " + std::to_string(failed) + " samples failed and were dropped";
    judge(theta, th, -1.0, note);
    if (missing_roots > 0)
        note += "; checked on the " + std::to_string(r1.y.size()) + " samples with two roots";
    judge(small, r1, 1.0, note);
    judge(large, r2, -1.0, note);
    report.checks.push_back(theta);
    report.checks.push_back(small);
    report.checks.push_back(large);
    return report;
}

ConvergenceStudy run_convergence_study(double R0, double t_end, std::size_t n_coarse, double dt_coarse,
                                       const ModelParams& params, const SmoothingSpec& spec, unsigned threads)
{
    if (n_coarse < 17 || n_coarse % 2 == 0)
        throw InvalidArgument("convergence study needs an odd n_coarse >= 17");
    if (!(dt_coarse > 0.0) || !(t_end > 0.0))
        throw InvalidArgument("convergence study needs positive dt and t_end");
    if (!(params.c > 0.0))
        throw InvalidArgument("convergence study runs the full solver and needs c > 0");

    ConvergenceStudy out;
    out.n_coarse = n_coarse;
    out.n_fine = 2 * (n_coarse - 1) + 1;
    out.n_reference = 8 * (n_coarse - 1) + 1;
    out.dt_values = {dt_coarse, 0.5 * dt_coarse, 0.25 * dt_coarse};
    const double dt_spatial = std::min(1e-3, 0.25 * dt_coarse);

    // Initial data on the reference grid; every coarser grid is nested in it.
    const auto data = InitialData::comparison_profile(R0, out.n_reference, params, spec);

    struct Job {
        std::size_t n;
        double dt;
        TimeScheme scheme;
    };
    std::vector<Job> jobs{{out.n_reference, dt_spatial, TimeScheme::CrankNicolson},
                          {n_coarse, dt_spatial, TimeScheme::CrankNicolson},
                          {out.n_fine, dt_spatial, TimeScheme::CrankNicolson}};
    for (auto scheme : {TimeScheme::BackwardEuler, TimeScheme::CrankNicolson})
        for (double dt : out.dt_values)
            jobs.push_back({n_coarse, dt, scheme});

    std::vector<double> result(jobs.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> messages(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        SolverOpts o;
        o.n_grid = jobs[i].n;
        o.dt_init = o.dt_max = jobs[i].dt;
        o.scheme = jobs[i].scheme;
        o.picard_tol = 1e-13;
        o.picard_max = 30;
        o.stationary_rate = 0.0;
        o.record_outputs_only = true;
        result[i] = final_radius_at(data, t_end, params, spec, o, messages[i]);
    });
    for (const auto& m : messages)
        if (!m.empty()) throw NumericalError("convergence run failed: " + m);

    out.spatial_error_coarse = result[1] - result[0];
    out.spatial_error_fine = result[2] - result[0];
    out.spatial_ratio = out.spatial_error_coarse / out.spatial_error_fine;
    out.be_ratio = (result[3] - result[4]) / (result[4] - result[5]);
    out.cn_ratio = (result[6] - result[7]) / (result[7] - result[8]);
    return out;
}

VerificationReport judge_convergence(const ConvergenceStudy& study)
{
    VerificationReport report;
    auto spatial = ratio_check("spatial_convergence", "second-order spatial discretization", study.spatial_ratio,
                               3.5, 4.5);
    spatial.details += "; n = " + std::to_string(study.n_coarse) + ", " + std::to_string(study.n_fine) +
                       " against " + std::to_string(study.n_reference);
    report.checks.push_back(spatial);
    report.checks.push_back(
        ratio_check("temporal_convergence_backward_euler", "first order in time", study.be_ratio, 1.8, 2.2));
    report.checks.push_back(
        ratio_check("temporal_convergence_crank_nicolson", "second order in time", study.cn_ratio, 3.5, 4.5));
    return report;
}

} // namespace tumorfb
