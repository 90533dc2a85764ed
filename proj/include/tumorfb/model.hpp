#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tumorfb {

/// Dimensionless model constants.
///
/// `c` is the ratio of the nutrient diffusion time scale to the tumor
/// doubling time scale; `c == 0` selects the quasi-stationary reduction.
struct ModelParams {
    double c = 0.0;
    double lambda = 1.0;      ///< nutrient consumption rate
    double mu = 1.0;          ///< proliferation rate
    double sigma_tilde = 0.3; ///< apoptosis threshold concentration
    double sigma_bar = 1.0;   ///< external nutrient concentration
    double gamma = 0.5;       ///< cell-to-cell adhesiveness

    /// Throws InvalidArgument unless all constants are admissible.
    void validate() const;
    [[nodiscard]] bool is_scaled() const noexcept { return lambda == 1.0 && sigma_bar == 1.0; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class SmoothingKind { CubicSmoothstep, QuinticSmoothstep, LinearRamp };

std::string_view to_string(SmoothingKind kind);
SmoothingKind smoothing_kind_from_string(std::string_view name);

/// Cut-off H switching the Gibbs-Thomson boundary value on between gamma
/// and 2*gamma.
struct SmoothingSpec {
    SmoothingKind kind = SmoothingKind::CubicSmoothstep;
    double transition_lo = 0.5; ///< H == 0 at and below
    double transition_hi = 1.0; ///< H == 1 at and above

    static SmoothingSpec for_gamma(double gamma, SmoothingKind kind = SmoothingKind::CubicSmoothstep);
    void validate() const;

    friend bool operator==(const SmoothingSpec&, const SmoothingSpec&) = default;
};

double eval_H(double r, const SmoothingSpec& spec);
double eval_H_prime(double r, const SmoothingSpec& spec);

/// Boundary concentration sigma_bar * (1 - gamma/R) * H(R).
double eval_G(double R, const ModelParams& params, const SmoothingSpec& spec);

/// (r coth r - 1) / r^2, with a series branch near 0 and an overflow-free
/// branch for large r.
double coth_factor(double r);

/// f(r) = (1 - gamma/r)(r coth r - 1)/r^2.
double eval_f(double r, double gamma);

/// F(r) = 3 f(r) H(r), in scaled (lambda = sigma_bar = 1) coordinates.
double eval_F(double r, const ModelParams& params, const SmoothingSpec& spec);

/// F evaluated in the scaled frame for a radius given in user units:
/// F'(sqrt(lambda) R) with the adhesiveness and cut-off rescaled alike.
double eval_F_user(double R, const ModelParams& params, const SmoothingSpec& spec);

/// R sinh(k r) / (r sinh(k R)) for 0 <= r <= R, k = sqrt(lambda).
double sinh_ratio(double r, double R, double k = 1.0);

/// Stationary concentration profile for a tumor of radius R_s.
double eval_stationary_profile(double r, double R_s, const ModelParams& params, const SmoothingSpec& spec);

/// Quasi-stationary comparison profile v(r) at the instantaneous radius R.
double eval_comparison_profile_v(double r, double R, const ModelParams& params, const SmoothingSpec& spec);

/// Factors mapping scaled quantities back to user units:
/// r_user = r_scaled / length, t_user = t_scaled / time,
/// sigma_user = sigma_scaled * concentration.
struct ScaleFactors {
    double length = 1.0;        ///< sqrt(lambda)
    double time = 1.0;
    double concentration = 1.0; ///< sigma_bar

    [[nodiscard]] double radius_to_user(double r_scaled) const { return r_scaled / length; }
    [[nodiscard]] double radius_to_scaled(double r_user) const { return r_user * length; }
    [[nodiscard]] double time_to_user(double t_scaled) const { return t_scaled / time; }
    [[nodiscard]] double conc_to_user(double s_scaled) const { return s_scaled * concentration; }
    [[nodiscard]] double conc_to_scaled(double s_user) const { return s_user / concentration; }
};

struct ScaledModel {
    ModelParams params;
    SmoothingSpec spec;
    ScaleFactors factors;
};

/// Rescales to lambda = sigma_bar = 1 with r' = sqrt(lambda) r, t' = t and
/// sigma' = sigma / sigma_bar. The smoothing transition moves with gamma.
ScaledModel nondimensionalize(const ModelParams& params, const SmoothingSpec& spec);

/// Initial concentration sampled on the uniform grid y_i = i/(n-1) of
/// [0, 1], i.e. at r_i = R0 * y_i.
struct InitialData {
    double R0 = 1.0;
    std::vector<double> sigma0;

    /// G(R0) * y^2: flat at the centre and compatible at the boundary.
    static InitialData quadratic_compatible(double R0, std::size_t n, const ModelParams& params,
                                            const SmoothingSpec& spec);
    /// Comparison profile v at R0 (the stationary profile when R0 is a root).
    static InitialData comparison_profile(double R0, std::size_t n, const ModelParams& params,
                                          const SmoothingSpec& spec);
    /// Constant interior value clamped to [0, sigma_bar] blended smoothly into
    /// G(R0) near the boundary: u = a + (G - a) y^4.
    static InitialData quartic_blend(double R0, double centre, std::size_t n, const ModelParams& params,
                                     const SmoothingSpec& spec);
};

enum class ViolationKind { NonPositiveRadius, TooFewSamples, OutOfRange, CentreSlope, BoundaryMismatch };

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    double location;  ///< radius r where the violation was detected
    double magnitude; ///< size of the offence
};

struct ValidationResult {
    std::vector<Violation> violations;
    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

ValidationResult validate_initial_data(const InitialData& data, const ModelParams& params, const SmoothingSpec& spec);

/// Linear interpolation of uniform samples on [0, 1] onto a new uniform grid.
std::vector<double> resample_uniform(std::span<const double> values, std::size_t n);

} // namespace tumorfb
