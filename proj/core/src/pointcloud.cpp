#include "advreg/pointcloud.hpp"

#include <cmath>
#include <string>

#include "advreg/error.hpp"

namespace advreg {

Points PointCloud::as_matrix() const {
  Points m(3, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = points[i];
  return m;
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("centroid: empty cloud");
  Vec3 sum = Vec3::Zero();
  for (const auto& p : cloud.points) sum += p;
  return sum / static_cast<double>(cloud.size());
}

double rms_radius(const PointCloud& cloud) {
  const Vec3 c = centroid(cloud);
  double acc = 0.0;
  for (const auto& p : cloud.points) acc += (p - c).squaredNorm();
  return std::sqrt(acc / static_cast<double>(cloud.size()));
}

BoundingBox bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("bounding_box: empty cloud");
  BoundingBox box{cloud.points.front(), cloud.points.front()};
  for (const auto& p : cloud.points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

std::pair<PointCloud, NormalizationRecord> normalize(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("normalize: empty cloud");
  NormalizationRecord record{centroid(cloud), rms_radius(cloud)};
  if (!(record.scale > 0.0) || !std::isfinite(record.scale))
    throw DegenerateInput("normalize: all points coincide");
  return {apply_normalization(cloud, record), record};
}

PointCloud apply_normalization(const PointCloud& cloud, const NormalizationRecord& record) {
  PointCloud out{{}, cloud.source_path};
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(record.apply(p));
  return out;
}

PointCloud denormalize(const PointCloud& cloud, const NormalizationRecord& record) {
  PointCloud out{{}, cloud.source_path};
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(record.invert(p));
  return out;
}

PointCloud transformed(const PointCloud& cloud, const RigidTransform& t) {
  const Mat3 r = t.rotation();
  PointCloud out{{}, cloud.source_path};
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(r * p + t.translation);
  return out;
}

Vec3 normal_vec3(RandomStream& rng) {
  const double x = rng.normal();
  const double y = rng.normal();
  const double z = rng.normal();
  return {x, y, z};
}

Points sample_batch(const PointCloud& cloud, std::size_t n, RandomStream& rng) {
  if (cloud.empty()) throw InvalidArgument("sample_batch: empty cloud");
  if (n == 0) throw InvalidArgument("sample_batch: batch size must be >= 1");
  Points batch(3, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < batch.cols(); ++i) batch.col(i) = cloud.points[rng.index(cloud.size())];
  return batch;
}

void validate_cloud(const PointCloud& cloud, const char* name) {
  if (cloud.empty()) throw InvalidArgument(std::string(name) + " cloud is empty");
  for (const auto& p : cloud.points)
    if (!p.allFinite()) throw InvalidArgument(std::string(name) + " cloud has non-finite points");
  if (!(rms_radius(cloud) > 0.0)) throw DegenerateInput(std::string(name) + " cloud is degenerate (all points coincide)");
}

}  // namespace advreg
