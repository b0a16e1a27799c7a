#include "advreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "advreg/error.hpp"

namespace advreg {

namespace {

void require_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite input");
}

// Coefficients of Rodrigues' formula and of the right Jacobian as functions
// of the angle. The (1 - cos)/t^2 term is evaluated as 2 sin^2(t/2)/t^2,
// which has no cancellation.
struct RodriguesCoeffs {
  double a;  // sin(t)/t
  double b;  // (1 - cos t)/t^2
  double c;  // (t - sin t)/t^3
};

RodriguesCoeffs rodrigues_coeffs(double theta) {
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    return {1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0};
  }
  const double half_sin = std::sin(0.5 * theta);
  const double t2 = theta * theta;
  return {std::sin(theta) / theta, 2.0 * half_sin * half_sin / t2,
          (theta - std::sin(theta)) / (t2 * theta)};
}

}  // namespace

RigidTransform RigidTransform::from_params(const Vec6& params) {
  return {params.head<3>(), params.tail<3>()};
}

Vec6 RigidTransform::params() const {
  Vec6 p;
  p << rotation_vector, translation;
  return p;
}

Mat3 RigidTransform::rotation() const { return exp_map(rotation_vector); }

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Mat3 exp_map(const Vec3& omega) {
  require_finite(omega, "exp_map");
  const auto k = rodrigues_coeffs(omega.norm());
  const Mat3 w = skew(omega);
  return Mat3::Identity() + k.a * w + k.b * (w * w);
}

Vec3 log_map(const Mat3& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.axis() * aa.angle();
}

Mat3 right_jacobian(const Vec3& omega) {
  const auto k = rodrigues_coeffs(omega.norm());
  const Mat3 w = skew(omega);
  return Mat3::Identity() - k.b * w + k.c * (w * w);
}

Vec3 apply_transform(const RigidTransform& t, const Vec3& p) {
  require_finite(p, "apply_transform");
  require_finite(t.translation, "apply_transform");
  return exp_map(t.rotation_vector) * p + t.translation;
}

Mat36 d_transform_d_params(const RigidTransform& t, const Vec3& p) {
  const Mat3 r = exp_map(t.rotation_vector);
  Mat36 j;
  j.leftCols<3>() = -r * skew(p) * right_jacobian(t.rotation_vector);
  j.rightCols<3>() = Mat3::Identity();
  return j;
}

double angular_distance(const Mat3& r_gt, const Mat3& r) {
  if (!is_rotation(r_gt) || !is_rotation(r))
    throw InvalidArgument("angular_distance: input is not a rotation matrix");
  const double x = std::clamp((r_gt - r).norm() / std::sqrt(8.0), 0.0, 1.0);
  if (x < std::numbers::sqrt2 / 2.0) return 2.0 * std::asin(x);
  // Near pi asin(x) is ill-conditioned. cos(theta/2) = |sin theta| / (2 x),
  // with |sin theta| read off the antisymmetric part of R_gt^T R.
  const Mat3 q = r_gt.transpose() * r;
  const double sin_theta = (q - q.transpose()).norm() / (2.0 * std::numbers::sqrt2);
  return 2.0 * std::atan2(x, sin_theta / (2.0 * x));
}

Vec3 canonicalize_rotation_vector(const Vec3& omega) {
  require_finite(omega, "canonicalize_rotation_vector");
  const double theta = omega.norm();
  if (theta == 0.0) return Vec3::Zero();
  const double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(theta, two_pi);
  if (wrapped > std::numbers::pi) wrapped -= two_pi;
  return omega * (wrapped / theta);
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  if ((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  const Mat3 ra = a.rotation();
  return make_transform(ra * b.rotation(), ra * b.translation + a.translation);
}

RigidTransform inverse(const RigidTransform& t) {
  const Mat3 rt = t.rotation().transpose();
  return make_transform(rt, -(rt * t.translation));
}

RigidTransform make_transform(const Mat3& rotation, const Vec3& translation) {
  return {log_map(rotation), translation};
}

}  // namespace advreg
