#pragma once

// Independent reference evaluations for the tests. Everything here is
// written directly from the closed forms in extended precision and shares
// no code with the library.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

enum class Ramp { Cubic, Quintic, Linear };

inline long double H(long double r, long double gamma, Ramp kind = Ramp::Cubic)
{
    if (r <= gamma) return 0.0L;
    if (r >= 2.0L * gamma) return 1.0L;
    const long double x = (r - gamma) / gamma;
    switch (kind) {
    case Ramp::Cubic: return 3.0L * x * x - 2.0L * x * x * x;
    case Ramp::Quintic: return 6.0L * powl(x, 5) - 15.0L * powl(x, 4) + 10.0L * powl(x, 3);
    case Ramp::Linear: return x;
    }
    return x;
}

/// 3 (1 - gamma/r)(r cosh r / sinh r - 1) / r^2 * H(r).
inline long double F(long double r, long double gamma, Ramp kind = Ramp::Cubic)
{
    if (r <= gamma) return 0.0L;
    const long double coth = coshl(r) / sinhl(r);
    return 3.0L * (1.0L - gamma / r) * (r * coth - 1.0L) / (r * r) * H(r, gamma, kind);
}

/// (1 - gamma/R) R sinh r / (r sinh R) H(R) with sigma_bar = 1.
inline long double sigma_s(long double r, long double R, long double gamma, Ramp kind = Ramp::Cubic)
{
    const long double ratio = r == 0.0L ? R / sinhl(R) : R * sinhl(r) / (r * sinhl(R));
    return (1.0L - gamma / R) * ratio * H(R, gamma, kind);
}

/// Arg-max of F over (gamma, r_max) on a uniform grid of the given step.
inline std::pair<double, double> dense_argmax(double gamma, double r_max, double step, Ramp kind = Ramp::Cubic)
{
    double best_r = gamma, best_f = 0.0;
    const auto count = static_cast<std::size_t>((r_max - gamma) / step);
    for (std::size_t i = 1; i <= count; ++i) {
        const long double r = gamma + static_cast<long double>(i) * step;
        const long double f = F(r, gamma, kind);
        if (f > best_f) {
            best_f = static_cast<double>(f);
            best_r = static_cast<double>(r);
        }
    }
    return {best_r, best_f};
}

/// Midpoints of grid cells where F - target changes sign on (gamma, r_max).
inline std::vector<double> dense_crossings(double gamma, double target, double r_max, double step,
                                           Ramp kind = Ramp::Cubic)
{
    std::vector<double> out;
    long double prev_r = gamma;
    long double prev_g = -target;
    const auto count = static_cast<std::size_t>((r_max - gamma) / step);
    for (std::size_t i = 1; i <= count; ++i) {
        const long double r = gamma + static_cast<long double>(i) * step;
        const long double g = F(r, gamma, kind) - target;
        if ((g > 0.0L) != (prev_g > 0.0L))
            out.push_back(static_cast<double>(0.5L * (r + prev_r)));
        prev_r = r;
        prev_g = g;
    }
    return out;
}

/// Central difference of F in extended precision.
inline double F_slope(double r, double gamma, Ramp kind = Ramp::Cubic)
{
    const long double h = 1e-6L * r;
    return static_cast<double>((F(r + h, gamma, kind) - F(r - h, gamma, kind)) / (2.0L * h));
}

} // namespace oracle
