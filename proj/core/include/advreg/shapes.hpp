#pragma once

#include <cstddef>

#include "advreg/pointcloud.hpp"
#include "advreg/random.hpp"

namespace advreg::shapes {

/// Uniform samples of the unit sphere restricted to an asymmetric region:
/// the cap z > -0.3 with the wedge {x < 0, y < 0, z > 0.2} cut away.
PointCloud sphere_section(std::size_t n, RandomStream& rng);

/// Surface samples of a compound of ellipsoids (body, head, two ears of
/// unequal length, tail), area-weighted. No rotational symmetry.
PointCloud critter(std::size_t n, RandomStream& rng);

/// Three orthogonal arms of lengths 2, 1.3 and 0.7 along +x, +y, +z with
/// Gaussian cross-section (sigma 0.15); point counts 3:2:1 by arm.
PointCloud tripod(std::size_t n, RandomStream& rng);

}  // namespace advreg::shapes
