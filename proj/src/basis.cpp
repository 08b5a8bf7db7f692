#include "bps/basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <tuple>

#include "bps/random.hpp"

namespace bps {

std::string_view to_string(BasisStrategy s) {
  switch (s) {
    case BasisStrategy::RectGrid: return "rect-grid";
    case BasisStrategy::BallGrid: return "ball-grid";
    case BasisStrategy::UniformBall: return "uniform-ball";
    case BasisStrategy::Hcp: return "hcp";
  }
  return "unknown";
}

std::optional<BasisStrategy> parse_strategy(std::string_view name) {
  if (name == "rect" || name == "rect-grid") return BasisStrategy::RectGrid;
  if (name == "ball" || name == "ball-grid") return BasisStrategy::BallGrid;
  if (name == "uniform" || name == "uniform-ball") return BasisStrategy::UniformBall;
  if (name == "hcp") return BasisStrategy::Hcp;
  return std::nullopt;
}

namespace {

class Fnv1a {
 public:
  void bytes(std::uint64_t v, int count) {
    for (int b = 0; b < count; ++b) {
      hash_ ^= (v >> (8 * b)) & 0xffu;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash_basis(const PointCloud& points, double radius, BasisStrategy strategy, std::uint64_t seed) {
  Fnv1a h;
  h.bytes(static_cast<std::uint8_t>(strategy), 1);
  h.u64(seed);
  h.f64(radius);
  h.u64(points.size());
  h.u64(points.dim());
  for (double c : points.coords()) h.f64(c);
  return h.value();
}

double grid_coord(std::size_t i, std::size_t m, double r) {
  return -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(m - 1);
}

Vec3 snapped(const Vec3& p) { return {snap_to_lattice(p[0]), snap_to_lattice(p[1]), snap_to_lattice(p[2])}; }

Vec3 grid_point(std::size_t flat, std::size_t m, double r) {
  return snapped({grid_coord(flat % m, m, r), grid_coord((flat / m) % m, m, r), grid_coord(flat / (m * m), m, r)});
}

double sq_norm(const Vec3& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; }

void require_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidParams, "basis radius must be positive and finite");
}

void require_count(std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidCount, "basis size k must be >= 1");
}

}  // namespace

BasisPointSet::BasisPointSet(PointCloud points, double radius, BasisStrategy strategy, std::uint64_t seed)
    : points_(std::move(points)), radius_(radius), strategy_(strategy), seed_(seed) {
  require_radius(radius_);
  if (points_.empty()) throw Error(ErrorCode::InvalidCount, "basis must contain at least one point");
  const double bound = radius_ + 1e-12 * std::max(1.0, radius_);
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const std::vector<double> origin(points_.dim(), 0.0);
    if (std::sqrt(squared_distance(points_.point(j), origin)) > bound)
      throw Error(ErrorCode::InvalidParams, "basis point " + std::to_string(j) + " lies outside the basis radius");
  }
  id_ = hash_basis(points_, radius_, strategy_, seed_);
}

BasisPointSet generate_rect_grid(std::size_t m, double r) {
  if (m < 2) throw Error(ErrorCode::InvalidResolution, "rect grid needs m >= 2");
  require_radius(r);
  PointCloud pts(3);
  pts.reserve(m * m * m);
  for (std::size_t flat = 0; flat < m * m * m; ++flat) pts.push_back(grid_point(flat, m, r));
  return BasisPointSet(std::move(pts), r * std::sqrt(3.0), BasisStrategy::RectGrid, 0);
}

std::size_t count_in_ball(std::size_t m, double r) {
  if (m < 2) throw Error(ErrorCode::InvalidResolution, "rect grid needs m >= 2");
  std::size_t count = 0;
  for (std::size_t flat = 0; flat < m * m * m; ++flat)
    if (sq_norm(grid_point(flat, m, r)) <= r * r) ++count;
  return count;
}

std::size_t ball_grid_resolution(std::size_t k, double r) {
  require_count(k);
  require_radius(r);
  std::size_t m = 2;
  while (count_in_ball(m, r) < k) ++m;
  return m;
}

BasisPointSet generate_ball_grid(std::size_t k, double r) {
  const std::size_t m = ball_grid_resolution(k, r);
  std::vector<std::pair<double, std::size_t>> inside;  // (squared norm, grid index)
  for (std::size_t flat = 0; flat < m * m * m; ++flat) {
    const double sq = sq_norm(grid_point(flat, m, r));
    if (sq <= r * r) inside.emplace_back(sq, flat);
  }
  std::sort(inside.begin(), inside.end());
  inside.resize(k);
  std::sort(inside.begin(), inside.end(), [](const auto& a, const auto& b) { return a.second < b.second; });

  PointCloud pts(3);
  pts.reserve(k);
  for (const auto& [sq, flat] : inside) pts.push_back(grid_point(flat, m, r));
  return BasisPointSet(std::move(pts), r, BasisStrategy::BallGrid, 0);
}

BasisPointSet generate_uniform_ball(std::size_t k, double r, std::uint64_t seed) {
  require_count(k);
  require_radius(r);
  Rng rng(seed);
  PointCloud pts(3);
  pts.reserve(k);
  while (pts.size() < k) {
    const Vec3 p{rng.uniform(-r, r), rng.uniform(-r, r), rng.uniform(-r, r)};
    if (sq_norm(p) <= r * r) pts.push_back(snapped(p));
  }
  return BasisPointSet(std::move(pts), r, BasisStrategy::UniformBall, seed);
}

namespace {

struct LatticePoint {
  Vec3 unit;  // coordinates at unit spacing
  double sq = 0.0;
  std::size_t shell = 0;
};

Vec3 hcp_unit(long i, long j, long l) {
  const auto pmod2 = [](long v) { return static_cast<double>(((v % 2) + 2) % 2); };
  const double x = 0.5 * (2.0 * static_cast<double>(i) + pmod2(j + l));
  const double y = 0.5 * std::sqrt(3.0) * (static_cast<double>(j) + pmod2(l) / 3.0);
  const double z = 0.5 * (2.0 * std::sqrt(6.0) / 3.0) * static_cast<double>(l);
  return {x, y, z};
}

// All unit-spacing lattice points, sorted by shell then (x, y, z), covering at least k points.
std::vector<LatticePoint> hcp_shells(std::size_t k) {
  // Unit-spacing HCP has sqrt(2) points per unit volume.
  double rho = std::cbrt(3.0 * static_cast<double>(k) / (4.0 * std::numbers::pi * std::sqrt(2.0))) + 1.5;
  for (;;) {
    const long ni = static_cast<long>(std::ceil(rho)) + 1;
    const long nj = static_cast<long>(std::ceil(2.0 * rho / std::sqrt(3.0))) + 1;
    const long nl = static_cast<long>(std::ceil(rho / (std::sqrt(6.0) / 3.0))) + 1;
    std::vector<LatticePoint> pts;
    for (long l = -nl; l <= nl; ++l)
      for (long j = -nj; j <= nj; ++j)
        for (long i = -ni; i <= ni; ++i) {
          const Vec3 u = hcp_unit(i, j, l);
          const double sq = sq_norm(u);
          if (sq <= rho * rho) pts.push_back({u, sq, 0});
        }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.sq < b.sq; });
    // The k-th point's whole shell must be inside the enumerated radius.
    if (pts.size() >= k && pts[k - 1].sq < rho * rho - 1e-6) {
      // Lattice norms are discrete; differences below 1e-9 are rounding noise within one shell.
      std::size_t shell = 0;
      for (std::size_t p = 1; p < pts.size(); ++p) {
        if (pts[p].sq - pts[p - 1].sq > 1e-9) ++shell;
        pts[p].shell = shell;
      }
      std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return std::tie(a.shell, a.unit[0], a.unit[1], a.unit[2]) < std::tie(b.shell, b.unit[0], b.unit[1], b.unit[2]);
      });
      return pts;
    }
    rho *= 1.5;
  }
}

double spacing_for(const std::vector<LatticePoint>& shells, std::size_t k, double r) {
  // Scale so the outermost point of the k-th point's shell lands on the ball surface.
  const std::size_t shell = shells[k - 1].shell;
  double max_sq = 0.0;
  for (const auto& p : shells)
    if (p.shell == shell) max_sq = std::max(max_sq, p.sq);
  return r / std::sqrt(max_sq);
}

}  // namespace

std::optional<double> hcp_spacing(std::size_t k, double r) {
  require_count(k);
  require_radius(r);
  if (k == 1) return std::nullopt;
  return spacing_for(hcp_shells(k), k, r);
}

BasisPointSet generate_hcp(std::size_t k, double r) {
  require_count(k);
  require_radius(r);
  PointCloud pts(3);
  if (k == 1) {
    pts.push_back(Vec3{0.0, 0.0, 0.0});
    return BasisPointSet(std::move(pts), r, BasisStrategy::Hcp, 0);
  }
  const auto shells = hcp_shells(k);
  const double s = spacing_for(shells, k, r);
  pts.reserve(k);
  for (std::size_t p = 0; p < k; ++p) {
    const Vec3& u = shells[p].unit;
    pts.push_back(snapped({u[0] * s, u[1] * s, u[2] * s}));
  }
  return BasisPointSet(std::move(pts), r, BasisStrategy::Hcp, 0);
}

}  // namespace bps
