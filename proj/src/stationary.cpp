#include "tumorfb/stationary.hpp"

#include "tumorfb/error.hpp"
#include "tumorfb/parallel.hpp"

#include <cmath>
#include <sstream>

namespace tumorfb {

namespace {

void require_scaled(const ModelParams& params)
{
    params.validate();
    if (!params.is_scaled())
        throw InvalidArgument("stationary analysis expects scaled parameters (lambda = sigma_bar = 1)");
}

// Bisection on [lo, hi] for F(r) = target; requires a sign change.
double bisect_root(double lo, double hi, double target, const ModelParams& params, const SmoothingSpec& spec)
{
    double g_lo = eval_F(lo, params, spec) - target;
    const double g_hi = eval_F(hi, params, spec) - target;
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if ((g_lo > 0.0) == (g_hi > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "bisection bracket [" << lo << ", " << hi << "] has no sign change for F(r) = " << target;
        throw NumericalError(os.str());
    }
    // Bisect down to adjacent doubles; kRootTolerance is only the accuracy floor.
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double g_mid = eval_F(mid, params, spec) - target;
        if (g_mid == 0.0) return mid;
        if ((g_mid > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StationaryRoot make_root(double r, const ModelParams& params, const SmoothingSpec& spec)
{
    const double slope = eval_F_slope(r, params, spec);
    const int sign = (slope > 0.0) - (slope < 0.0);
    // Linearising dR/dt = (mu/3)(F(R) - sigma_tilde) R at a root gives the
    // growth factor (mu/3) F'(R) R.
    const Stability s = sign < 0 ? Stability::Stable : (sign > 0 ? Stability::Unstable : Stability::Degenerate);
    return {r, sign, s};
}

} // namespace

std::string_view to_string(Stability s)
{
    switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Degenerate: return "degenerate";
    }
    return "degenerate";
}

std::optional<double> StationaryLandscape::small_root() const
{
    if (roots.size() == 2) return roots.front().radius;
    return std::nullopt;
}

std::optional<double> StationaryLandscape::large_root() const
{
    if (roots.size() == 2) return roots.back().radius;
    return std::nullopt;
}

double eval_F_slope(double r, const ModelParams& params, const SmoothingSpec& spec)
{
    const double step = 1e-6 * r;
    return (eval_F(r + step, params, spec) - eval_F(r - step, params, spec)) / (2.0 * step);
}

double find_r_sharp(const ModelParams& params, const SmoothingSpec& spec)
{
    require_scaled(params);
    spec.validate();
    const double a0 = 2.0 * params.gamma;
    const double b0 = 2.0 * params.gamma + 2.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

    double a = a0, b = b0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval_F(x1, params, spec);
    double f2 = eval_F(x2, params, spec);
    while (b - a > kRootTolerance) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval_F(x2, params, spec);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval_F(x1, params, spec);
        }
    }
    const double r = 0.5 * (a + b);

    const double fr = eval_F(r, params, spec);
    const double probe = 1e-3 * std::max(1.0, r);
    const bool interior = r - a0 > probe && b0 - r > probe;
    const bool dominates = fr > eval_F(a0, params, spec) && fr > eval_F(b0, params, spec);
    const double second_diff = eval_F(r + probe, params, spec) - 2.0 * fr + eval_F(r - probe, params, spec);
    if (!interior || !dominates || !(second_diff < 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "no interior maximum of F in [" << a0 << ", " << b0 << "] for smoothing '" << to_string(spec.kind)
           << "' (golden-section point " << r << ")";
        throw NumericalError(os.str());
    }
    return r;
}

double compute_theta_star(const ModelParams& params, const SmoothingSpec& spec)
{
    return eval_F(find_r_sharp(params, spec), params, spec);
}

StationaryLandscape find_stationary_radii(double sigma_tilde, const ModelParams& params, const SmoothingSpec& spec)
{
    if (!(sigma_tilde > 0.0))
        throw InvalidArgument("sigma_tilde must be positive");
    StationaryLandscape out;
    out.params = params;
    out.params.sigma_tilde = sigma_tilde;
    out.spec = spec;
    out.r_sharp = find_r_sharp(params, spec);
    out.theta_star = eval_F(out.r_sharp, params, spec);

    const double gap = sigma_tilde - out.theta_star;
    if (std::abs(gap) <= kDegenerateTolerance) {
        out.roots.push_back({out.r_sharp, 0, Stability::Degenerate});
        return out;
    }
    if (gap > 0.0)
        return out;

    const double eps_b = 1e-8 * std::max(1.0, params.gamma);
    const double r1 = bisect_root(params.gamma + eps_b, out.r_sharp, sigma_tilde, params, spec);

    double r_hi = 2.0 * out.r_sharp;
    for (int k = 0; k < 200 && eval_F(r_hi, params, spec) >= sigma_tilde; ++k)
        r_hi *= 2.0;
    const double r2 = bisect_root(out.r_sharp, r_hi, sigma_tilde, params, spec);

    out.roots.push_back(make_root(r1, params, spec));
    out.roots.push_back(make_root(r2, params, spec));
    return out;
}

RadialProfile stationary_solution(double R_s, const ModelParams& params, const SmoothingSpec& spec,
                                  std::size_t n_grid)
{
    if (n_grid < 16)
        throw InvalidArgument("stationary_solution needs n_grid >= 16");
    RadialProfile p;
    p.R = R_s;
    p.u.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i)
        p.u[i] = eval_stationary_profile(std::min(R_s * p.y(i), R_s), R_s, params, spec);
    p.u.back() = eval_G(R_s, params, spec);
    return p;
}

std::string_view to_string(ScanAxis axis)
{
    return axis == ScanAxis::Gamma ? "gamma" : "sigma_tilde";
}

ScanAxis scan_axis_from_string(std::string_view name)
{
    if (name == "gamma") return ScanAxis::Gamma;
    if (name == "sigma_tilde") return ScanAxis::SigmaTilde;
    throw InvalidArgument("unknown scan axis '" + std::string(name) + "' (expected gamma or sigma_tilde)");
}

BifurcationScan scan_bifurcation(ScanAxis axis, double lo, double hi, std::size_t n_samples,
                                 const ModelParams& fixed, SmoothingKind kind, unsigned threads)
{
    if (n_samples == 0)
        throw InvalidArgument("scan needs at least one sample");
    if (n_samples > 1 && !(lo < hi))
        throw InvalidArgument("scan range must satisfy lo < hi");
    if (!(lo > 0.0))
        throw InvalidArgument("scan range must stay positive");
    require_scaled(fixed);

    BifurcationScan scan;
    scan.axis = axis;
    scan.samples.resize(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        const double t = n_samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n_samples - 1);
        auto& sample = scan.samples[i];
        sample.value = (i + 1 == n_samples && n_samples > 1) ? hi : lo + t * (hi - lo);
        ModelParams p = fixed;
        if (axis == ScanAxis::Gamma)
            p.gamma = sample.value;
        else
            p.sigma_tilde = sample.value;
        try {
            sample.landscape = find_stationary_radii(p.sigma_tilde, p, SmoothingSpec::for_gamma(p.gamma, kind));
        } catch (const std::exception& e) {
            sample.error = e.what();
        }
    });
    return scan;
}

} // namespace tumorfb
