#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "bps/core.hpp"

namespace bps {

enum class BasisStrategy : std::uint8_t { RectGrid = 0, BallGrid = 1, UniformBall = 2, Hcp = 3 };

std::string_view to_string(BasisStrategy s);
/// Accepts both the long names (rect-grid, ball-grid, uniform-ball, hcp) and
/// the CLI short names (rect, ball, uniform, hcp).
std::optional<BasisStrategy> parse_strategy(std::string_view name);

/// Fixed, ordered set of basis points. Feature j of every encoding refers to
/// point j. All points lie within `radius` of the origin; for rect grids the
/// radius is that of the circumscribed ball (half-width * sqrt(3)).
class BasisPointSet {
 public:
  /// Validates k >= 1, radius > 0 and the norm bound; throws InvalidCount / InvalidParams.
  BasisPointSet(PointCloud points, double radius, BasisStrategy strategy, std::uint64_t seed);

  const PointCloud& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  double radius() const noexcept { return radius_; }
  BasisStrategy strategy() const noexcept { return strategy_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Content hash (FNV-1a 64) over strategy, seed, radius and all coordinates.
  std::uint64_t id() const noexcept { return id_; }

  friend bool operator==(const BasisPointSet& a, const BasisPointSet& b) {
    return a.strategy_ == b.strategy_ && a.seed_ == b.seed_ && a.radius_ == b.radius_ && a.points_ == b.points_;
  }

 private:
  PointCloud points_;
  double radius_;
  BasisStrategy strategy_;
  std::uint64_t seed_;
  std::uint64_t id_;
};

/// m^3 points of the cube [-r, r]^3 at -r + 2r*i/(m-1) per axis, row-major with x fastest.
BasisPointSet generate_rect_grid(std::size_t m, double r = 1.0);

/// Number of points of the m^3 rect grid of half-width r with norm <= r.
std::size_t count_in_ball(std::size_t m, double r = 1.0);

/// Smallest grid resolution whose in-ball count reaches k.
std::size_t ball_grid_resolution(std::size_t k, double r = 1.0);

/// The k smallest-norm in-ball points of the smallest sufficient rect grid
/// (norm ties broken by grid order). Returned in row-major grid order.
BasisPointSet generate_ball_grid(std::size_t k, double r = 1.0);

/// k i.i.d. points uniform in the ball of radius r, by rejection from [-r, r]^3.
/// Draws come from bps::Rng, so output is bit-identical for equal (k, r, seed).
BasisPointSet generate_uniform_ball(std::size_t k, double r, std::uint64_t seed);

/// Nearest-neighbor spacing chosen for an HCP basis of k points in radius r:
/// the largest spacing that still leaves at least k lattice points inside the
/// ball. Undefined (returns nullopt) for k = 1, where only the origin is used.
std::optional<double> hcp_spacing(std::size_t k, double r = 1.0);

/// Hexagonal close packing centered at the origin. With spacing s, lattice
/// point (i, j, l) for integers i, j, l sits at
///
///   x = s/2 * (2i + ((j + l) mod 2))
///   y = s/2 * sqrt(3) * (j + (l mod 2) / 3)
///   z = s/2 * (2 sqrt(6) / 3) * l
///
/// (A-B stacking along z; mod is the non-negative residue). The spacing is
/// hcp_spacing(k, r); the k smallest-norm lattice points are returned ordered
/// by norm shell, then lexicographically by (x, y, z).
BasisPointSet generate_hcp(std::size_t k, double r = 1.0);

}  // namespace bps
