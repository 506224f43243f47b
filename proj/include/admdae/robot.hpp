#pragma once

#include "admdae/config.hpp"

namespace admdae::robot {

/// Planar two-link robot with link lengths l1 = l2 = 1 and masses m1 = m2 = 3,
/// one position constraint l1 sin p1 + l2 sin(p1 + p2) = 0, and consistent
/// initial data p0 = (0, 0), v0 = (1, -2). The exact motion is
/// p = (sin t, -2 sin t), v = (cos t, -2 cos t), lambda = cos t.
///
/// The off-diagonal mass entries are both m2 (l2^2/3 + l1 l2 cos(p2)/2); the
/// matrix is symmetric, as the inertia of the linkage requires.
SystemConfig config();

LoadedSystem load();

}  // namespace admdae::robot
