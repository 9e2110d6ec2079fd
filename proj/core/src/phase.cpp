// SPDX-License-Identifier: Apache-2.0

#include "splat360/phase.hpp"

#include <cmath>

#include "splat360/error.hpp"

namespace splat360 {
namespace {

void check_g(double g) {
    if (!(g > -1.0 && g < 1.0)) throw ArgumentError("phase: asymmetry g must lie in (-1, 1)");
}

} // namespace

double henyey_greenstein(double cos_theta, double g) {
    check_g(g);
    return phase_factor(cos_theta, g) / (4.0 * kPi);
}

double phase(const Vec3& dir, const Vec3& normal, double g) {
    return henyey_greenstein(dir.dot(normal), g);
}

double phase_factor(double cos_theta, double g) {
    const double denom = 1.0 + g * g - 2.0 * g * cos_theta;
    return (1.0 - g * g) / (denom * std::sqrt(denom));
}

double phase_factor_dg(double cos_theta, double g) {
    // f = (1 - g^2) D^{-3/2},  D = 1 + g^2 - 2 g c
    const double denom = 1.0 + g * g - 2.0 * g * cos_theta;
    const double inv_15 = 1.0 / (denom * std::sqrt(denom));
    const double inv_25 = inv_15 / denom;
    return -2.0 * g * inv_15 - 1.5 * (1.0 - g * g) * inv_25 * (2.0 * g - 2.0 * cos_theta);
}

} // namespace splat360
