#include "advreg/icp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SVD>

#include "advreg/error.hpp"
#include "advreg/kdtree.hpp"

namespace advreg {

void IcpConfig::validate() const {
  if (max_iterations < 1) throw InvalidArgument("icp: max_iterations must be >= 1");
  if (!(convergence_epsilon > 0.0)) throw InvalidArgument("icp: convergence_epsilon must be > 0");
  if (!initial_transform.rotation_vector.allFinite() || !initial_transform.translation.allFinite())
    throw InvalidArgument("icp: initial transform is not finite");
}

RigidFit best_rigid_fit_matrix(std::span<const Vec3> source, std::span<const Vec3> target) {
  if (source.size() != target.size()) throw InvalidArgument("best_rigid_fit: pair count mismatch");
  if (source.size() < 3) throw DegenerateInput("best_rigid_fit: need at least 3 pairs");
  const double n = static_cast<double>(source.size());
  Vec3 cs = Vec3::Zero(), ct = Vec3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    cs += source[i];
    ct += target[i];
  }
  cs /= n;
  ct /= n;
  Mat3 cov = Mat3::Zero();
  double spread = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    cov += (source[i] - cs) * (target[i] - ct).transpose();
    spread += (source[i] - cs).squaredNorm() + (target[i] - ct).squaredNorm();
  }
  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  // A rank < 2 cross-covariance leaves the rotation about some axis free.
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * std::max(sv(0), spread))
    throw DegenerateInput("best_rigid_fit: collinear or coincident configuration");
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidFit fit;
  fit.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  fit.translation = ct - fit.rotation * cs;
  return fit;
}

RigidTransform best_rigid_fit(std::span<const Vec3> source, std::span<const Vec3> target) {
  return best_rigid_fit_matrix(source, target).to_transform();
}

RegistrationResult icp_register(const PointCloud& source, const PointCloud& target, const IcpConfig& cfg) {
  cfg.validate();
  validate_cloud(source, "source");
  validate_cloud(target, "target");
  const auto start = std::chrono::steady_clock::now();
  const KdTree tree(target.points);

  RegistrationResult out;
  Mat3 rotation = cfg.initial_transform.rotation();
  Vec3 translation = cfg.initial_transform.translation;
  std::vector<Vec3> matched(source.size());
  double previous = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    double mse = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
      const auto nn = tree.nearest(rotation * source.points[i] + translation);
      matched[i] = target.points[nn.index];
      mse += nn.distance * nn.distance;
    }
    mse /= static_cast<double>(source.size());
    out.correspondence_mse.push_back(mse);
    out.epochs_run = iter + 1;
    if (std::abs(previous - mse) < cfg.convergence_epsilon) break;
    previous = mse;
    const RigidFit fit = best_rigid_fit_matrix(source.points, matched);
    rotation = fit.rotation;
    translation = fit.translation;
  }
  out.transform = make_transform(rotation, translation);
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace advreg
