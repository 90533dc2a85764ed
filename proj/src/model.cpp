#include "tumorfb/model.hpp"

#include "tumorfb/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tumorfb {

namespace {

constexpr double kSeriesCutoff = 1e-2;
constexpr double kLargeArgument = 30.0;

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be positive and finite, got " << value;
        throw InvalidArgument(os.str());
    }
}

// Position inside the transition interval, clamped to [0, 1].
double transition_coordinate(double r, const SmoothingSpec& spec)
{
    const double width = spec.transition_hi - spec.transition_lo;
    return std::clamp((r - spec.transition_lo) / width, 0.0, 1.0);
}

} // namespace

void ModelParams::validate() const
{
    if (!(c >= 0.0) || !std::isfinite(c))
        throw InvalidArgument("c must be non-negative and finite");
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    require_positive(sigma_tilde, "sigma_tilde");
    require_positive(sigma_bar, "sigma_bar");
    require_positive(gamma, "gamma");
}

std::string_view to_string(SmoothingKind kind)
{
    switch (kind) {
    case SmoothingKind::CubicSmoothstep: return "cubic";
    case SmoothingKind::QuinticSmoothstep: return "quintic";
    case SmoothingKind::LinearRamp: return "linear";
    }
    return "cubic";
}

SmoothingKind smoothing_kind_from_string(std::string_view name)
{
    if (name == "cubic") return SmoothingKind::CubicSmoothstep;
    if (name == "quintic") return SmoothingKind::QuinticSmoothstep;
    if (name == "linear") return SmoothingKind::LinearRamp;
    throw InvalidArgument("unknown smoothing kind '" + std::string(name) + "' (expected cubic, quintic or linear)");
}

SmoothingSpec SmoothingSpec::for_gamma(double gamma, SmoothingKind kind)
{
    require_positive(gamma, "gamma");
    return SmoothingSpec{kind, gamma, 2.0 * gamma};
}

void SmoothingSpec::validate() const
{
    require_positive(transition_lo, "transition_lo");
    if (!(transition_hi > transition_lo) || !std::isfinite(transition_hi))
        throw InvalidArgument("transition_hi must exceed transition_lo");
}

double eval_H(double r, const SmoothingSpec& spec)
{
    const double x = transition_coordinate(r, spec);
    switch (spec.kind) {
    case SmoothingKind::CubicSmoothstep: return x * x * (3.0 - 2.0 * x);
    case SmoothingKind::QuinticSmoothstep: return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
    case SmoothingKind::LinearRamp: return x;
    }
    return x;
}

double eval_H_prime(double r, const SmoothingSpec& spec)
{
    const double width = spec.transition_hi - spec.transition_lo;
    if (spec.kind == SmoothingKind::LinearRamp) {
        // One-sided (right) value at the corners.
        return (r >= spec.transition_lo && r < spec.transition_hi) ? 1.0 / width : 0.0;
    }
    if (r <= spec.transition_lo || r >= spec.transition_hi)
        return 0.0;
    const double x = (r - spec.transition_lo) / width;
    if (spec.kind == SmoothingKind::CubicSmoothstep)
        return 6.0 * x * (1.0 - x) / width;
    return 30.0 * x * x * (1.0 - x) * (1.0 - x) / width;
}

double eval_G(double R, const ModelParams& params, const SmoothingSpec& spec)
{
    require_positive(R, "radius");
    if (R <= params.gamma)
        return 0.0;
    return params.sigma_bar * (1.0 - params.gamma / R) * eval_H(R, spec);
}

double coth_factor(double r)
{
    if (r < kSeriesCutoff) {
        const double r2 = r * r;
        return 1.0 / 3.0 - r2 / 45.0 + 2.0 * r2 * r2 / 945.0;
    }
    double coth;
    if (r > kLargeArgument) {
        const double e = std::exp(-2.0 * r);
        coth = (1.0 + e) / (1.0 - e);
    } else {
        coth = 1.0 / std::tanh(r);
    }
    return (r * coth - 1.0) / (r * r);
}

double eval_f(double r, double gamma)
{
    require_positive(r, "radius");
    return (1.0 - gamma / r) * coth_factor(r);
}

double eval_F(double r, const ModelParams& params, const SmoothingSpec& spec)
{
    require_positive(r, "radius");
    if (r <= params.gamma)
        return 0.0;
    return 3.0 * eval_f(r, params.gamma) * eval_H(r, spec);
}

double eval_F_user(double R, const ModelParams& params, const SmoothingSpec& spec)
{
    require_positive(R, "radius");
    if (R <= params.gamma)
        return 0.0;
    const double k = std::sqrt(params.lambda);
    // H only sees R relative to its transition, which scales with gamma.
    return 3.0 * eval_f(k * R, k * params.gamma) * eval_H(R, spec);
}

double sinh_ratio(double r, double R, double k)
{
    require_positive(R, "radius");
    if (r < 0.0 || r > R)
        throw InvalidArgument("profile radius must lie in [0, R]");
    const double kr = k * r;
    const double kR = k * R;
    if (kR > kLargeArgument) {
        // e^{kr - kR} (1 - e^{-2kr}) / (1 - e^{-2kR}), with the 1/r factor kept separate.
        const double num = (kr > 0.0) ? -std::expm1(-2.0 * kr) / kr : 2.0;
        const double den = -std::expm1(-2.0 * kR) / kR;
        return std::exp(kr - kR) * num / den;
    }
    const double sinhc_r = (kr > 0.0) ? std::sinh(kr) / kr : 1.0;
    return sinhc_r * kR / std::sinh(kR);
}

double eval_stationary_profile(double r, double R_s, const ModelParams& params, const SmoothingSpec& spec)
{
    const double ratio = sinh_ratio(r, R_s, std::sqrt(params.lambda));
    return eval_G(R_s, params, spec) * ratio;
}

double eval_comparison_profile_v(double r, double R, const ModelParams& params, const SmoothingSpec& spec)
{
    return eval_stationary_profile(r, R, params, spec);
}

ScaledModel nondimensionalize(const ModelParams& params, const SmoothingSpec& spec)
{
    params.validate();
    spec.validate();
    const double k = std::sqrt(params.lambda);
    ScaledModel out;
    out.factors = ScaleFactors{k, 1.0, params.sigma_bar};
    out.params.lambda = 1.0;
    out.params.sigma_bar = 1.0;
    out.params.gamma = params.gamma * k;
    out.params.sigma_tilde = params.sigma_tilde / params.sigma_bar;
    out.params.mu = params.mu * params.sigma_bar;
    out.params.c = params.c / params.lambda;
    out.spec = SmoothingSpec{spec.kind, spec.transition_lo * k, spec.transition_hi * k};
    return out;
}

InitialData InitialData::quadratic_compatible(double R0, std::size_t n, const ModelParams& params,
                                              const SmoothingSpec& spec)
{
    const double g = eval_G(R0, params, spec);
    InitialData data{R0, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n - 1);
        data.sigma0[i] = g * y * y;
    }
    data.sigma0.back() = g;
    return data;
}

InitialData InitialData::comparison_profile(double R0, std::size_t n, const ModelParams& params,
                                            const SmoothingSpec& spec)
{
    InitialData data{R0, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n - 1);
        data.sigma0[i] = eval_comparison_profile_v(std::min(R0 * y, R0), R0, params, spec);
    }
    data.sigma0.back() = eval_G(R0, params, spec);
    return data;
}

InitialData InitialData::quartic_blend(double R0, double centre, std::size_t n, const ModelParams& params,
                                       const SmoothingSpec& spec)
{
    const double g = eval_G(R0, params, spec);
    const double a = std::clamp(centre, 0.0, params.sigma_bar);
    InitialData data{R0, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n - 1);
        const double y2 = y * y;
        data.sigma0[i] = a + (g - a) * y2 * y2;
    }
    data.sigma0.back() = g;
    return data;
}

std::string_view to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::NonPositiveRadius: return "non_positive_radius";
    case ViolationKind::TooFewSamples: return "too_few_samples";
    case ViolationKind::OutOfRange: return "out_of_range";
    case ViolationKind::CentreSlope: return "centre_slope";
    case ViolationKind::BoundaryMismatch: return "boundary_mismatch";
    }
    return "unknown";
}

ValidationResult validate_initial_data(const InitialData& data, const ModelParams& params, const SmoothingSpec& spec)
{
    ValidationResult result;
    auto& out = result.violations;
    if (!(data.R0 > 0.0) || !std::isfinite(data.R0)) {
        out.push_back({ViolationKind::NonPositiveRadius, 0.0, data.R0});
        return result;
    }
    const auto& u = data.sigma0;
    const std::size_t n = u.size();
    if (n < 3) {
        out.push_back({ViolationKind::TooFewSamples, 0.0, static_cast<double>(n)});
        return result;
    }
    const double dr = data.R0 / static_cast<double>(n - 1);

    for (std::size_t i = 0; i < n; ++i) {
        const double excess = std::max(-u[i], u[i] - params.sigma_bar);
        if (excess > 0.0 || !std::isfinite(u[i]))
            out.push_back({ViolationKind::OutOfRange, dr * static_cast<double>(i), excess});
    }

    // Second-order one-sided slope at the centre. For an even profile it is
    // O(dr^3); the tolerance is the curvature scale u'' * dr near the centre.
    const double slope = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dr);
    double curvature = 0.0;
    for (std::size_t i = 1; i + 1 < n && i <= 3; ++i)
        curvature = std::max(curvature, std::abs(u[i + 1] - 2.0 * u[i] + u[i - 1]));
    const double slope_tol = 1e-8 + curvature / dr;
    if (std::abs(slope) > slope_tol)
        out.push_back({ViolationKind::CentreSlope, 0.0, std::abs(slope)});

    const double g = eval_G(data.R0, params, spec);
    const double mismatch = std::abs(u.back() - g);
    if (mismatch > 1e-12 * params.sigma_bar)
        out.push_back({ViolationKind::BoundaryMismatch, data.R0, mismatch});
    return result;
}

std::vector<double> resample_uniform(std::span<const double> values, std::size_t n)
{
    if (values.size() < 2 || n < 2)
        throw InvalidArgument("resampling needs at least two points on each grid");
    if (values.size() == n)
        return {values.begin(), values.end()};
    std::vector<double> out(n);
    const double scale = static_cast<double>(values.size() - 1) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = static_cast<double>(i) * scale;
        const auto j = std::min(static_cast<std::size_t>(pos), values.size() - 2);
        const double w = pos - static_cast<double>(j);
        out[i] = (1.0 - w) * values[j] + w * values[j + 1];
    }
    out.back() = values.back();
    return out;
}

} // namespace tumorfb
