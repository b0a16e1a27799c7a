#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "advreg/geometry.hpp"
#include "advreg/random.hpp"

namespace advreg {

/// Column-major 3xN block of points; the batch layout used by the critic.
using Points = Eigen::Matrix3Xd;

struct PointCloud {
  std::vector<Vec3> points;
  std::optional<std::string> source_path;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  Points as_matrix() const;
};

/// Centroid subtraction followed by isotropic division by `scale`.
struct NormalizationRecord {
  Vec3 centroid = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return (p - centroid) / scale; }
  Vec3 invert(const Vec3& p) const { return p * scale + centroid; }
};

struct BoundingBox {
  Vec3 min;
  Vec3 max;
};

enum class CloudFormat { ply, xyz };
enum class PlyEncoding { ascii, binary_little_endian };

/// Guess the format from the file extension (".xyz"/".txt" -> xyz, else ply).
CloudFormat format_from_path(const std::string& path);

/// Reads vertex positions. PLY: ascii and binary_little_endian, float or
/// double x/y/z; every other element and property is skipped. XYZ: one
/// "x y z" per line, '#' lines ignored.
PointCloud load_point_cloud(const std::string& path, CloudFormat format);
PointCloud load_point_cloud(const std::string& path);

void write_ply(const std::string& path, const PointCloud& cloud,
               PlyEncoding encoding = PlyEncoding::binary_little_endian);
void write_xyz(const std::string& path, const PointCloud& cloud);

Vec3 centroid(const PointCloud& cloud);
/// sqrt(mean |p - centroid|^2).
double rms_radius(const PointCloud& cloud);
BoundingBox bounding_box(const PointCloud& cloud);

/// Zero centroid and unit RMS radius. Throws DegenerateInput when every
/// point coincides.
std::pair<PointCloud, NormalizationRecord> normalize(const PointCloud& cloud);
PointCloud apply_normalization(const PointCloud& cloud, const NormalizationRecord& record);
PointCloud denormalize(const PointCloud& cloud, const NormalizationRecord& record);

PointCloud transformed(const PointCloud& cloud, const RigidTransform& t);

/// Standard normal vector; components drawn in x, y, z order.
Vec3 normal_vec3(RandomStream& rng);

/// n points drawn uniformly with replacement.
Points sample_batch(const PointCloud& cloud, std::size_t n, RandomStream& rng);

/// Throws InvalidArgument/DegenerateInput unless the cloud is usable for
/// registration (non-empty, finite, non-zero spread).
void validate_cloud(const PointCloud& cloud, const char* name);

}  // namespace advreg
