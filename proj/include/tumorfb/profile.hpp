#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tumorfb {

/// Concentration u(y) on the fixed grid y_i = i/(n-1) of [0, 1] for a tumor
/// of radius R, i.e. sigma(R y_i).
struct RadialProfile {
    std::vector<double> u;
    double R = 1.0;

    [[nodiscard]] std::size_t n() const noexcept { return u.size(); }
    [[nodiscard]] double h() const noexcept { return 1.0 / static_cast<double>(u.size() - 1); }
    [[nodiscard]] double y(std::size_t i) const noexcept { return static_cast<double>(i) * h(); }
};

/// Composite Simpson rule over uniformly spaced samples on [0, 1].
/// Requires an odd number of samples (even number of panels).
double simpson_unit(std::span<const double> f);

} // namespace tumorfb
