#pragma once

#include <cstddef>
#include <cstdint>

#include "bps/basis.hpp"
#include "bps/core.hpp"
#include "bps/encode.hpp"

namespace bps {

/// The k points b_j + delta_j, duplicates kept. On lattice-aligned input (see
/// normalize()) every returned point is bit-identical to a source point.
PointCloud decode_delta(const BpsEncoding& enc, const BasisPointSet& basis);

/// Centers of occupied cells, in cell order.
PointCloud decode_occupancy(const VoxelGrid& grid);

/// n_keep points drawn uniformly without replacement, returned in source order.
PointCloud decode_subsample(const PointCloud& cloud, std::size_t n_keep, std::uint64_t seed);

/// Bidirectional Chamfer distance with squared norms:
///   mean_x min_y |x - y|^2 + mean_y min_x |x - y|^2.
/// Both directions go through SpatialIndex. Throws EmptyCloud / DimensionMismatch.
double chamfer(const PointCloud& a, const PointCloud& b);

}  // namespace bps
