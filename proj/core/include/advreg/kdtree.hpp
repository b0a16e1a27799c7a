#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "advreg/geometry.hpp"

namespace advreg {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Balanced 3-d tree for exact nearest-neighbour queries. Ties are resolved
/// towards the lowest point index. The tree copies the points it indexes.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 8);

  Neighbor nearest(const Vec3& query) const;
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  struct Node {
    // Leaves hold [begin, end) of order_; inner nodes split at `value` on `axis`.
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    int axis = -1;
    double value = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, std::size_t& best, double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

Neighbor nearest_neighbor(const KdTree& tree, const Vec3& query);

}  // namespace advreg
