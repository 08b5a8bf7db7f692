#include "bps/reconstruct.hpp"

#include <algorithm>
#include <numeric>

#include "bps/nnsearch.hpp"
#include "bps/random.hpp"

namespace bps {

PointCloud decode_delta(const BpsEncoding& enc, const BasisPointSet& basis) {
  if (enc.kind != EncodingKind::Delta) throw Error(ErrorCode::KindMismatch, "decode_delta needs a delta encoding");
  if (enc.basis_id != basis.id() || enc.size() != basis.size() || enc.dim != basis.dim())
    throw Error(ErrorCode::BasisMismatch, "encoding was produced with a different basis");
  const std::size_t d = enc.dim;
  std::vector<double> out(enc.values.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto b = basis.points().point(j);
    for (std::size_t a = 0; a < d; ++a) out[j * d + a] = b[a] + enc.values[j * d + a];
  }
  return PointCloud(std::move(out), d);
}

PointCloud decode_occupancy(const VoxelGrid& grid) {
  if (grid.kind != GridKind::Occupancy) throw Error(ErrorCode::KindMismatch, "decode_occupancy needs an occupancy grid");
  PointCloud out(3);
  out.reserve(grid.occupied_count());
  for (std::size_t c = 0; c < grid.cells.size(); ++c)
    if (grid.cells[c] != 0.0) out.push_back(grid.cell_center(c));
  return out;
}

PointCloud decode_subsample(const PointCloud& cloud, std::size_t n_keep, std::uint64_t seed) {
  const std::size_t n = cloud.size();
  if (n_keep == 0 || n_keep > n)
    throw Error(ErrorCode::InvalidCount, "subsample size must be in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first n_keep slots become a uniform random subset.
  for (std::size_t i = 0; i < n_keep; ++i) std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  idx.resize(n_keep);
  std::sort(idx.begin(), idx.end());

  PointCloud out(cloud.dim());
  out.reserve(n_keep);
  for (std::size_t i : idx) out.push_back(cloud.point(i));
  return out;
}

namespace {

double mean_nearest_sq(const PointCloud& from, const SpatialIndex& to) {
  double sum = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) sum += to.nearest(from.point(i)).sq_distance;
  return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCloud, "chamfer distance needs two non-empty clouds");
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "chamfer clouds differ in dimension");
  const SpatialIndex index_a(a);
  const SpatialIndex index_b(b);
  return mean_nearest_sq(a, index_b) + mean_nearest_sq(b, index_a);
}

}  // namespace bps
