#include "bps/nnsearch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <type_traits>

#include "bps/kernels.hpp"
#include "bps/parallel.hpp"

namespace bps {

namespace {

// Rows reached through a permutation of the source cloud. Works for any dim.
struct GatherRows {
  std::vector<std::size_t>& perm;
  const PointCloud& cloud;

  double coord(std::size_t p, std::size_t a) const { return cloud(perm[p], a); }
  std::size_t index(std::size_t p) const { return perm[p]; }
  template <class Less>
  void select(std::size_t begin, std::size_t mid, std::size_t end, Less less) {
    std::nth_element(perm.begin() + begin, perm.begin() + mid, perm.begin() + end, less);
  }
  void sort_by_index(std::size_t begin, std::size_t end) { std::sort(perm.begin() + begin, perm.begin() + end); }
};

// Packed 3-D rows moved in place, so partitioning streams memory instead of
// gathering from the source cloud.
struct PackedRows3 {
  struct Item {
    std::array<double, 3> c;
    std::size_t index;
  };
  std::vector<Item> items;

  double coord(std::size_t p, std::size_t a) const { return items[p].c[a]; }
  std::size_t index(std::size_t p) const { return items[p].index; }
  template <class Less>
  void select(std::size_t begin, std::size_t mid, std::size_t end, Less less) {
    std::nth_element(items.begin() + begin, items.begin() + mid, items.begin() + end,
                     [&](const Item& x, const Item& y) { return less(x, y); });
  }
  void sort_by_index(std::size_t begin, std::size_t end) {
    std::sort(items.begin() + begin, items.begin() + end,
              [](const Item& x, const Item& y) { return x.index < y.index; });
  }
};

}  // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud, std::size_t leaf_size) : dim_(cloud.dim()), leaf_size_(leaf_size) {
  const std::size_t n = cloud.size();
  if (n == 0) throw Error(ErrorCode::EmptyCloud, "cannot index an empty cloud");
  if (leaf_size_ == 0) throw Error(ErrorCode::InvalidParams, "leaf_size must be >= 1");

  std::vector<std::size_t> perm(n);
  // Leaves hold at least ceil(leaf_size / 2) points, so the tree has fewer
  // than 4n / leaf_size + 2 nodes.
  const std::size_t max_nodes = 4 * (n / leaf_size_ + 1);
  nodes_.reserve(max_nodes);
  centers_.reserve(max_nodes * dim_);
  if (dim_ == 3) {
    PackedRows3 rows;
    rows.items.resize(n);
    for (std::size_t i = 0; i < n; ++i) rows.items[i] = {{cloud(i, 0), cloud(i, 1), cloud(i, 2)}, i};
    build(rows, 0, n);
    for (std::size_t pos = 0; pos < n; ++pos) perm[pos] = rows.items[pos].index;
  } else {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    GatherRows rows{perm, cloud};
    build(rows, 0, n);
  }

  soa_.resize(dim_ * n);
  for (std::size_t pos = 0; pos < n; ++pos)
    for (std::size_t a = 0; a < dim_; ++a) soa_[a * n + pos] = cloud(perm[pos], a);
  order_ = std::move(perm);
}

template <class Rows>
std::size_t SpatialIndex::build(Rows& rows, std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0, 0.0});
  centers_.resize(centers_.size() + dim_, 0.0);

  const std::size_t count = end - begin;
  double* center = centers_.data() + id * dim_;
  for (std::size_t p = begin; p < end; ++p)
    for (std::size_t a = 0; a < dim_; ++a) center[a] += rows.coord(p, a);
  for (std::size_t a = 0; a < dim_; ++a) center[a] /= static_cast<double>(count);

  double max_sq = 0.0;
  for (std::size_t p = begin; p < end; ++p) {
    double sq = 0.0;
    for (std::size_t a = 0; a < dim_; ++a) {
      const double t = rows.coord(p, a) - center[a];
      sq += t * t;
    }
    max_sq = std::max(max_sq, sq);
  }
  nodes_[id].radius = std::sqrt(max_sq);

  if (count <= leaf_size_) {
    rows.sort_by_index(begin, end);
    return id;
  }

  std::size_t axis = 0;
  double best_spread = -1.0;
  for (std::size_t a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t p = begin; p < end; ++p) {
      lo = std::min(lo, rows.coord(p, a));
      hi = std::max(hi, rows.coord(p, a));
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      axis = a;
    }
  }

  const std::size_t mid = begin + count / 2;
  if constexpr (std::is_same_v<Rows, PackedRows3>) {
    rows.select(begin, mid, end, [axis](const PackedRows3::Item& x, const PackedRows3::Item& y) {
      return x.c[axis] < y.c[axis] || (x.c[axis] == y.c[axis] && x.index < y.index);
    });
  } else {
    const PointCloud& cloud = rows.cloud;
    rows.select(begin, mid, end, [&](std::size_t x, std::size_t y) {
      const double cx = cloud(x, axis);
      const double cy = cloud(y, axis);
      return cx < cy || (cx == cy && x < y);
    });
  }

  const std::size_t left = build(rows, begin, mid);
  const std::size_t right = build(rows, mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

NearestResult SpatialIndex::nearest(std::span<const double> query) const {
  if (query.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from index dimension");
  const auto& kern = kernels::active();
  const std::size_t n = order_.size();

  double best_sq = std::numeric_limits<double>::infinity();
  double best_dist = best_sq;
  std::size_t best_index = kernels::kNoIndex;

  auto center_dist = [&](std::size_t node) {
    return std::sqrt(squared_distance(query, {centers_.data() + node * dim_, dim_}));
  };

  // Depth is bounded by log2(n / leaf_size) + 1; 128 entries covers any addressable n.
  std::array<std::size_t, 128> stack;
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::size_t id = stack[--top];
    const Node& node = nodes_[id];
    const double dc = center_dist(id);
    // Relative slack absorbs rounding in dc and the radius, so the bound never
    // prunes a point that could tie with or beat the current best.
    if (dc - node.radius > best_dist + 1e-12 * (dc + node.radius + best_dist)) continue;

    if (node.left == 0) {
      const auto hit = kern.nearest_in_block(soa_.data() + node.begin, n, dim_, node.end - node.begin, query.data());
      if (hit.offset == kernels::kNoIndex) continue;
      const std::size_t src = order_[node.begin + hit.offset];
      if (hit.sq_dist < best_sq || (hit.sq_dist == best_sq && src < best_index)) {
        best_sq = hit.sq_dist;
        best_dist = std::sqrt(best_sq);
        best_index = src;
      }
      continue;
    }

    // Visit the nearer child first: push it last.
    const double dl = center_dist(node.left);
    const double dr = center_dist(node.right);
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return {best_index, best_dist, best_sq};
}

std::vector<NearestResult> SpatialIndex::nearest_all(const PointCloud& queries, std::size_t workers) const {
  if (queries.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from index dimension");
  std::vector<NearestResult> out(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t j) { out[j] = nearest(queries.point(j)); });
  return out;
}

NearestResult brute_force_nearest(const PointCloud& cloud, std::span<const double> query) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cannot search an empty cloud");
  if (query.size() != cloud.dim()) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from cloud");
  NearestResult best{0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double sq = squared_distance(cloud.point(i), query);
    if (sq < best.sq_distance) {
      best.sq_distance = sq;
      best.index = i;
    }
  }
  best.distance = std::sqrt(best.sq_distance);
  return best;
}

}  // namespace bps
