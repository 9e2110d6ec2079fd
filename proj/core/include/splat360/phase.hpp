// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splat360/types.hpp"

namespace splat360 {

/// Henyey-Greenstein phase function evaluated at cos_theta = dir . normal.
/// Integrates to 1 over the sphere. Throws ArgumentError when |g| >= 1.
double phase(const Vec3& dir, const Vec3& normal, double g);

/// p_HG for a given cosine.
double henyey_greenstein(double cos_theta, double g);

/// 4*pi*p_HG, i.e. the phase value rescaled so that g = 0 gives exactly 1.
/// This is the anisotropy factor applied to L_aniso during compositing.
double phase_factor(double cos_theta, double g);

/// d(phase_factor)/dg.
double phase_factor_dg(double cos_theta, double g);

} // namespace splat360
