#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bps/core.hpp"

namespace bps {

struct NearestResult {
  std::size_t index = 0;      // point index in the source cloud
  double distance = 0.0;      // Euclidean distance, sqrt(sq_distance)
  double sq_distance = 0.0;   // squared distance, summed axis by axis from 0.0

  friend bool operator==(const NearestResult&, const NearestResult&) = default;
};

/// Ball tree over a point cloud.
///
/// Nodes split at the median of the axis with the largest spread; each node
/// stores the centroid of its points and the max distance from it (the ball).
/// Points are copied into a structure-of-arrays buffer in tree order, and each
/// leaf's points are kept in ascending source-index order, so the leaf scan
/// kernel's smallest-offset tie-break is also the smallest-index tie-break.
///
/// Queries return exactly what brute_force_nearest returns: same index (ties
/// go to the smallest index) and the same squared distance bit for bit.
/// Build is O(n log n); a query is O(log n) on well-spread data. Immutable after
/// construction; concurrent queries are safe.
class SpatialIndex {
 public:
  static constexpr std::size_t kDefaultLeafSize = 32;

  /// Throws EmptyCloud for n = 0 and InvalidParams for leaf_size = 0.
  explicit SpatialIndex(const PointCloud& cloud, std::size_t leaf_size = kDefaultLeafSize);

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t leaf_size() const noexcept { return leaf_size_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  NearestResult nearest(std::span<const double> query) const;

  /// One result per query point; parallel over queries, identical for any worker count.
  std::vector<NearestResult> nearest_all(const PointCloud& queries, std::size_t workers = 1) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t left = 0;  // 0 marks a leaf (the root is never a child)
    std::size_t right = 0;
    double radius = 0.0;
  };

  template <class Rows>
  std::size_t build(Rows& rows, std::size_t begin, std::size_t end);

  std::size_t dim_;
  std::size_t leaf_size_;
  std::vector<Node> nodes_;
  std::vector<double> centers_;  // node_count * dim
  std::vector<double> soa_;      // axis-major: soa_[a * n + pos]
  std::vector<std::size_t> order_;  // tree position -> source index
};

inline SpatialIndex build_index(const PointCloud& cloud, std::size_t leaf_size = SpatialIndex::kDefaultLeafSize) {
  return SpatialIndex(cloud, leaf_size);
}

/// Exhaustive scan in source order; the ground truth for SpatialIndex.
NearestResult brute_force_nearest(const PointCloud& cloud, std::span<const double> query);

}  // namespace bps
