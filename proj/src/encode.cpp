#include "bps/encode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bps/parallel.hpp"

namespace bps {

BpsEncoding encode_bps(const PointCloud& cloud, const BasisPointSet& basis, EncodingKind kind,
                       const EncodeOptions& opts) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cannot encode an empty cloud");
  if (cloud.dim() != basis.dim())
    throw Error(ErrorCode::DimensionMismatch, "cloud and basis dimensions differ");
  if (!opts.allow_unnormalized) {
    const double norm = cloud.max_norm();
    if (norm > 1.0 + kNormalizedTolerance)
      throw Error(ErrorCode::CloudNotNormalized,
                  "max point norm " + std::to_string(norm) + " exceeds 1; normalize first or allow unnormalized input");
  }

  const SpatialIndex index(cloud, opts.leaf_size);
  const std::size_t k = basis.size();
  const std::size_t d = cloud.dim();

  BpsEncoding enc;
  enc.kind = kind;
  enc.dim = d;
  enc.source_size = cloud.size();
  enc.basis_id = basis.id();
  enc.nearest.resize(k);
  enc.values.resize(kind == EncodingKind::Distance ? k : k * d);

  for (std::size_t j = 0; j < k; ++j) {
    const auto b = basis.points().point(j);
    const NearestResult hit = index.nearest(b);
    enc.nearest[j] = hit.index;
    if (kind == EncodingKind::Distance) {
      enc.values[j] = hit.distance;
    } else {
      const auto x = cloud.point(hit.index);
      for (std::size_t a = 0; a < d; ++a) enc.values[j * d + a] = x[a] - b[a];
    }
  }
  return enc;
}

std::vector<BpsEncoding> encode_batch(std::span<const PointCloud> clouds, const BasisPointSet& basis,
                                      EncodingKind kind, std::size_t workers, const EncodeOptions& opts) {
  std::vector<BpsEncoding> out(clouds.size());
  parallel_for(clouds.size(), workers, [&](std::size_t i) { out[i] = encode_bps(clouds[i], basis, kind, opts); });
  return out;
}

BpsEncoding attach_payload(BpsEncoding enc, const AttributeTable& table) {
  if (enc.nearest.size() != enc.size())
    throw Error(ErrorCode::AttributeCardinalityMismatch, "encoding carries no nearest-point indices");
  if (table.width == 0 || table.values.size() % table.width != 0 || table.rows() != enc.source_size)
    throw Error(ErrorCode::AttributeCardinalityMismatch,
                "attribute table has " + std::to_string(table.rows()) + " rows, source cloud has " +
                    std::to_string(enc.source_size) + " points");
  enc.attribute_width = table.width;
  enc.attributes.resize(enc.size() * table.width);
  for (std::size_t j = 0; j < enc.size(); ++j) {
    const auto row = table.values.begin() + static_cast<std::ptrdiff_t>(enc.nearest[j] * table.width);
    std::copy(row, row + static_cast<std::ptrdiff_t>(table.width), enc.attributes.begin() + j * table.width);
  }
  return enc;
}

Vec3 VoxelGrid::cell_center(std::size_t flat_index) const {
  const std::size_t m = resolution;
  const auto center = [m](std::size_t i) { return -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m); };
  return {center(flat_index % m), center((flat_index / m) % m), center(flat_index / (m * m))};
}

std::size_t VoxelGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](double c) { return c != 0.0; }));
}

namespace {

constexpr double kDomainSlack = 1e-9;

void require_grid_input(const PointCloud& cloud, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidResolution, "grid resolution must be >= 1");
  if (cloud.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "voxel grids are three-dimensional");
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t a = 0; a < 3; ++a) {
      const double c = cloud(i, a);
      if (!(c >= -1.0 - kDomainSlack && c <= 1.0 + kDomainSlack))
        throw Error(ErrorCode::PointOutOfDomain, "point " + std::to_string(i) + " lies outside [-1, 1]^3");
    }
}

}  // namespace

std::size_t grid_cell(double coord, std::size_t m) {
  const double scaled = std::floor((coord + 1.0) * static_cast<double>(m) / 2.0);
  if (scaled <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(scaled), m - 1);
}

double default_truncation(std::size_t m) { return 2.0 * std::sqrt(3.0) / static_cast<double>(m); }

VoxelGrid encode_occupancy(const PointCloud& cloud, std::size_t m) {
  require_grid_input(cloud, m);
  VoxelGrid grid;
  grid.resolution = m;
  grid.kind = GridKind::Occupancy;
  grid.cells.assign(m * m * m, 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    grid.cells[grid.flat(grid_cell(cloud(i, 0), m), grid_cell(cloud(i, 1), m), grid_cell(cloud(i, 2), m))] = 1.0;
  return grid;
}

VoxelGrid encode_tdf(const PointCloud& cloud, std::size_t m, std::optional<double> truncation, std::size_t workers) {
  require_grid_input(cloud, m);
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cannot encode an empty cloud");
  const double tau = truncation.value_or(default_truncation(m));
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidTruncation, "truncation must be positive");

  VoxelGrid grid;
  grid.resolution = m;
  grid.kind = GridKind::Tdf;
  grid.truncation = tau;
  grid.cells.assign(m * m * m, 0.0);

  const SpatialIndex index(cloud);
  parallel_for(grid.cells.size(), workers, [&](std::size_t c) {
    const Vec3 center = grid.cell_center(c);
    grid.cells[c] = std::min(index.nearest(center).distance, tau);
  });
  return grid;
}

}  // namespace bps
