#pragma once

#include <Eigen/Dense>

namespace advreg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

/// Below this rotation angle the exp-map coefficients switch to their
/// second-order Taylor expansions.
inline constexpr double kSmallAngle = 1e-8;

/// Rigid motion p -> exp([w]x) p + t. The 6 parameters are ordered
/// (w_x, w_y, w_z, t_x, t_y, t_z) wherever they appear as a flat vector.
struct RigidTransform {
  Vec3 rotation_vector = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_params(const Vec6& params);
  Vec6 params() const;
  Mat3 rotation() const;
};

Mat3 skew(const Vec3& v);

/// Rodrigues' formula. Throws InvalidArgument on non-finite input.
Mat3 exp_map(const Vec3& omega);

/// Rotation vector of a rotation matrix, magnitude in [0, pi].
Vec3 log_map(const Mat3& rotation);

/// Right Jacobian of SO(3): d exp(w + dw) = exp(w) exp(J_r(w) dw).
Mat3 right_jacobian(const Vec3& omega);

Vec3 apply_transform(const RigidTransform& t, const Vec3& p);

/// d apply_transform(t, p) / d (rotation_vector, translation).
Mat36 d_transform_d_params(const RigidTransform& t, const Vec3& p);

/// Rotation error metric 2 asin(|R_gt - R|_F / sqrt(8)), in radians.
/// Throws InvalidArgument unless both inputs are rotations.
double angular_distance(const Mat3& r_gt, const Mat3& r);

/// Same rotation, magnitude wrapped into [0, pi].
Vec3 canonicalize_rotation_vector(const Vec3& omega);

/// Orthogonality and det = +1, each within `tol` per entry.
bool is_rotation(const Mat3& m, double tol = 1e-9);

/// a after b: compose(a, b)(p) == a(b(p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);
RigidTransform make_transform(const Mat3& rotation, const Vec3& translation);

constexpr double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

}  // namespace advreg
