#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bps/basis.hpp"
#include "bps/core.hpp"
#include "bps/nnsearch.hpp"

namespace bps {

enum class EncodingKind : std::uint8_t { Distance = 1, Delta = 2 };

/// Fixed-length BPS features of one cloud against one basis.
///
/// Distance kind: values[j] = min_x |b_j - x|, k scalars.
/// Delta kind:    values[j*dim .. j*dim+dim) = x*(j) - b_j, where x*(j) is the
///                nearest cloud point to b_j (smallest index on ties).
/// nearest[j] is the source index of x*(j). When attributes were attached,
/// attributes[j*attribute_width ..] is the attribute row of x*(j).
struct BpsEncoding {
  EncodingKind kind = EncodingKind::Distance;
  std::size_t dim = 3;
  std::vector<double> values;
  std::vector<std::size_t> nearest;
  std::size_t source_size = 0;
  std::size_t attribute_width = 0;
  std::vector<double> attributes;
  std::uint64_t basis_id = 0;

  std::size_t size() const noexcept {
    return kind == EncodingKind::Distance ? values.size() : (dim == 0 ? 0 : values.size() / dim);
  }
  std::span<const double> delta(std::size_t j) const { return {values.data() + j * dim, dim}; }
  std::span<const double> attribute(std::size_t j) const {
    return {attributes.data() + j * attribute_width, attribute_width};
  }
};

struct EncodeOptions {
  /// Skip the unit-ball check, for clouds encoded in raw coordinates against a
  /// basis of matching radius.
  bool allow_unnormalized = false;
  std::size_t leaf_size = SpatialIndex::kDefaultLeafSize;
};

/// Max point norm tolerated without allow_unnormalized.
inline constexpr double kNormalizedTolerance = 1e-6;

BpsEncoding encode_bps(const PointCloud& cloud, const BasisPointSet& basis, EncodingKind kind,
                       const EncodeOptions& opts = {});

inline BpsEncoding encode_bps_distance(const PointCloud& cloud, const BasisPointSet& basis,
                                       const EncodeOptions& opts = {}) {
  return encode_bps(cloud, basis, EncodingKind::Distance, opts);
}

inline BpsEncoding encode_bps_delta(const PointCloud& cloud, const BasisPointSet& basis,
                                    const EncodeOptions& opts = {}) {
  return encode_bps(cloud, basis, EncodingKind::Delta, opts);
}

/// Encodes every cloud against one basis, one index per cloud, parallel over clouds.
std::vector<BpsEncoding> encode_batch(std::span<const PointCloud> clouds, const BasisPointSet& basis,
                                      EncodingKind kind, std::size_t workers, const EncodeOptions& opts = {});

/// Per-point attribute rows (normals, colors, ...), row-major.
struct AttributeTable {
  std::size_t width = 0;
  std::vector<double> values;

  std::size_t rows() const noexcept { return width == 0 ? 0 : values.size() / width; }
};

/// Copies each basis point's nearest-point attribute row into the payload.
/// Throws AttributeCardinalityMismatch unless the table has one row per source point.
BpsEncoding attach_payload(BpsEncoding enc, const AttributeTable& table);

enum class GridKind : std::uint8_t { Occupancy = 0, Tdf = 1 };

/// m^3 cells over [-1, 1]^3, row-major with x fastest. Cell i along an axis
/// covers [-1 + 2i/m, -1 + 2(i+1)/m); a coordinate of exactly +1 maps to cell m-1.
struct VoxelGrid {
  std::size_t resolution = 0;
  GridKind kind = GridKind::Occupancy;
  double truncation = 0.0;  // tdf only
  std::vector<double> cells;

  std::size_t flat(std::size_t i, std::size_t j, std::size_t l) const { return i + resolution * (j + resolution * l); }
  double at(std::size_t i, std::size_t j, std::size_t l) const { return cells[flat(i, j, l)]; }
  Vec3 cell_center(std::size_t flat_index) const;
  std::size_t occupied_count() const;
};

/// Axis cell index of a coordinate in [-1, 1] at resolution m.
std::size_t grid_cell(double coord, std::size_t m);

/// One cell diagonal, 2*sqrt(3)/m.
double default_truncation(std::size_t m);

/// Cell is 1.0 iff it contains at least one point. Throws PointOutOfDomain for
/// coordinates outside [-1, 1] (1e-9 slack) and InvalidResolution for m = 0.
VoxelGrid encode_occupancy(const PointCloud& cloud, std::size_t m);

/// Cell value is min(distance from cell center to nearest point, truncation).
/// Truncation defaults to default_truncation(m).
VoxelGrid encode_tdf(const PointCloud& cloud, std::size_t m, std::optional<double> truncation = std::nullopt,
                     std::size_t workers = 1);

}  // namespace bps
