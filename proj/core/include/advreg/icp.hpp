#pragma once

#include <cstddef>
#include <span>

#include "advreg/geometry.hpp"
#include "advreg/pointcloud.hpp"
#include "advreg/registration.hpp"

namespace advreg {

struct IcpConfig {
  std::size_t max_iterations = 100;
  /// Stop when the correspondence MSE changes by less than this.
  double convergence_epsilon = 1e-8;
  RigidTransform initial_transform;

  void validate() const;
};

/// Rotation/translation minimising sum |R s_i + t - d_i|^2 (Kabsch with
/// reflection correction).
struct RigidFit {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  RigidTransform to_transform() const { return make_transform(rotation, translation); }
};

/// Throws DegenerateInput for fewer than 3 pairs or collinear/coincident
/// configurations, InvalidArgument for mismatched spans.
RigidFit best_rigid_fit_matrix(std::span<const Vec3> source, std::span<const Vec3> target);
RigidTransform best_rigid_fit(std::span<const Vec3> source, std::span<const Vec3> target);

/// Point-to-point ICP. Works on the clouds as given.
RegistrationResult icp_register(const PointCloud& source, const PointCloud& target, const IcpConfig& cfg);

}  // namespace advreg
