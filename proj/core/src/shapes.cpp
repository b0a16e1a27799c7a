#include "advreg/shapes.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace advreg::shapes {

namespace {

Vec3 unit_sphere_point(RandomStream& rng) {
  Vec3 v;
  do {
    v = normal_vec3(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

struct Ellipsoid {
  Vec3 center;
  Vec3 radii;
};

// Knud Thomsen's approximation; only used to weight parts by area.
double approx_area(const Ellipsoid& e) {
  constexpr double p = 1.6075;
  const double a = std::pow(e.radii.x(), p), b = std::pow(e.radii.y(), p), c = std::pow(e.radii.z(), p);
  return 4.0 * std::numbers::pi * std::pow((a * b + a * c + b * c) / 3.0, 1.0 / p);
}

// Uniform on the ellipsoid surface by rejection on the sphere parametrisation.
Vec3 ellipsoid_point(const Ellipsoid& e, RandomStream& rng) {
  const double gmax = e.radii.prod() / e.radii.minCoeff();
  while (true) {
    const Vec3 u = unit_sphere_point(rng);
    const Vec3 x = u.cwiseProduct(e.radii);
    // Area element relative to sphere: |grad| of the implicit function.
    const double g = std::sqrt(std::pow(e.radii.y() * e.radii.z() * u.x(), 2) +
                               std::pow(e.radii.x() * e.radii.z() * u.y(), 2) +
                               std::pow(e.radii.x() * e.radii.y() * u.z(), 2));
    if (rng.uniform() * gmax <= g) return x + e.center;
  }
}

bool inside(const Ellipsoid& e, const Vec3& p) {
  return (p - e.center).cwiseQuotient(e.radii).squaredNorm() < 1.0;
}

}  // namespace

PointCloud sphere_section(std::size_t n, RandomStream& rng) {
  PointCloud cloud;
  cloud.points.reserve(n);
  while (cloud.size() < n) {
    const Vec3 p = unit_sphere_point(rng);
    if (p.z() <= -0.3) continue;
    if (p.x() < 0.0 && p.y() < 0.0 && p.z() > 0.2) continue;
    cloud.points.push_back(p);
  }
  return cloud;
}

PointCloud critter(std::size_t n, RandomStream& rng) {
  const std::array<Ellipsoid, 5> parts{{
      {{0.0, 0.0, 0.0}, {1.0, 0.65, 0.55}},      // body
      {{0.95, 0.05, 0.45}, {0.38, 0.32, 0.33}},  // head
      {{1.0, 0.22, 0.95}, {0.08, 0.07, 0.38}},   // long ear
      {{1.05, -0.12, 0.85}, {0.07, 0.06, 0.24}}, // short ear
      {{-1.05, 0.0, 0.15}, {0.16, 0.14, 0.14}},  // tail
  }};
  std::array<double, parts.size()> cumulative{};
  double total = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += approx_area(parts[i]);
    cumulative[i] = total;
  }
  PointCloud cloud;
  cloud.points.reserve(n);
  while (cloud.size() < n) {
    const double r = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < parts.size() && r > cumulative[k]) ++k;
    const Vec3 p = ellipsoid_point(parts[k], rng);
    bool hidden = false;
    for (std::size_t j = 0; j < parts.size(); ++j)
      if (j != k && inside(parts[j], p)) hidden = true;
    if (!hidden) cloud.points.push_back(p);
  }
  return cloud;
}

PointCloud tripod(std::size_t n, RandomStream& rng) {
  constexpr double thickness = 0.15;
  PointCloud cloud;
  cloud.points.reserve(n);
  while (cloud.size() < n) {
    const auto arm = rng.index(6);
    const double r = rng.uniform();
    const double u = thickness * rng.normal();
    const double v = thickness * rng.normal();
    if (arm < 3)
      cloud.points.emplace_back(2.0 * r, u, v);
    else if (arm < 5)
      cloud.points.emplace_back(u, 1.3 * r, v);
    else
      cloud.points.emplace_back(u, v, 0.7 * r);
  }
  return cloud;
}

}  // namespace advreg::shapes
