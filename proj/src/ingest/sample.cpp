#include <algorithm>
#include <cmath>
#include <numbers>

#include "bps/ingest.hpp"
#include "bps/random.hpp"

namespace bps {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Index i with cumulative[i-1] <= target < cumulative[i]; zero-weight entries are never chosen.
std::size_t pick_weighted(const std::vector<double>& cumulative, double target) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto i = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(i, cumulative.size() - 1);
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, what);
}

}  // namespace

SurfaceSample sample_surface_with_faces(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidCount, "sample count must be >= 1");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroAreaMesh, "mesh has zero surface area");

  Rng rng(seed);
  SurfaceSample out{PointCloud(3), std::vector<std::size_t>(n)};
  out.points.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t f = pick_weighted(cumulative, rng.uniform01() * total);
    const auto& [ia, ib, ic] = mesh.faces[f];
    const Vec3& a = mesh.vertices[ia];
    const Vec3& b = mesh.vertices[ib];
    const Vec3& c = mesh.vertices[ic];
    const double su = std::sqrt(rng.uniform01());
    const double v = rng.uniform01();
    const double wa = 1.0 - su;
    const double wb = su * (1.0 - v);
    const double wc = su * v;
    out.points.push_back(Vec3{wa * a[0] + wb * b[0] + wc * c[0], wa * a[1] + wb * b[1] + wc * c[1],
                              wa * a[2] + wb * b[2] + wc * c[2]});
    out.faces[s] = f;
  }
  return out;
}

PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  return sample_surface_with_faces(mesh, n, seed).points;
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Torus: return "torus";
    case ShapeKind::Box: return "box";
    case ShapeKind::TwoSidedSheet: return "two-sided-sheet";
    case ShapeKind::Cylinder: return "cylinder";
  }
  return "unknown";
}

std::optional<ShapeKind> parse_shape_kind(std::string_view name) {
  for (auto k : {ShapeKind::Sphere, ShapeKind::Torus, ShapeKind::Box, ShapeKind::TwoSidedSheet, ShapeKind::Cylinder})
    if (name == to_string(k)) return k;
  if (name == "sheet") return ShapeKind::TwoSidedSheet;
  return std::nullopt;
}

ShapeParams default_params(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Sphere: return SphereParams{};
    case ShapeKind::Torus: return TorusParams{};
    case ShapeKind::Box: return BoxParams{};
    case ShapeKind::TwoSidedSheet: return SheetParams{};
    case ShapeKind::Cylinder: return CylinderParams{};
  }
  return SphereParams{};
}

ShapeKind kind_of(const ShapeParams& params) { return static_cast<ShapeKind>(params.index()); }

namespace {

struct SurfaceSampler {
  Rng& rng;
  PointCloud& out;

  void operator()(const SphereParams& p) const {
    require(p.radius > 0.0, "sphere radius must be positive");
    // Archimedes: z uniform in [-1, 1] is area-uniform on the sphere.
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = kTwoPi * rng.uniform01();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back(Vec3{p.radius * rho * std::cos(phi), p.radius * rho * std::sin(phi), p.radius * z});
  }

  void operator()(const TorusParams& p) const {
    require(p.minor > 0.0 && p.major > p.minor, "torus needs 0 < minor < major");
    // Area element is proportional to (R + r cos theta).
    double theta = 0.0;
    do {
      theta = kTwoPi * rng.uniform01();
    } while (rng.uniform01() * (p.major + p.minor) > p.major + p.minor * std::cos(theta));
    const double phi = kTwoPi * rng.uniform01();
    const double ring = p.major + p.minor * std::cos(theta);
    out.push_back(Vec3{ring * std::cos(phi), ring * std::sin(phi), p.minor * std::sin(theta)});
  }

  void operator()(const BoxParams& p) const {
    require(p.x > 0.0 && p.y > 0.0 && p.z > 0.0, "box edges must be positive");
    const double ayz = p.y * p.z;
    const double axz = p.x * p.z;
    const double axy = p.x * p.y;
    const double t = rng.uniform01() * 2.0 * (ayz + axz + axy);
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    const double u = rng.uniform(-0.5, 0.5);
    const double v = rng.uniform(-0.5, 0.5);
    if (t < 2.0 * ayz)
      out.push_back(Vec3{sign * 0.5 * p.x, u * p.y, v * p.z});
    else if (t < 2.0 * (ayz + axz))
      out.push_back(Vec3{u * p.x, sign * 0.5 * p.y, v * p.z});
    else
      out.push_back(Vec3{u * p.x, v * p.y, sign * 0.5 * p.z});
  }

  void operator()(const SheetParams& p) const {
    require(p.side > 0.0 && p.gap > 0.0, "sheet side and gap must be positive");
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    const double u = rng.uniform(-0.5, 0.5);
    const double v = rng.uniform(-0.5, 0.5);
    out.push_back(Vec3{u * p.side, v * p.side, sign * 0.5 * p.gap});
  }

  void operator()(const CylinderParams& p) const {
    require(p.radius > 0.0 && p.height > 0.0, "cylinder radius and height must be positive");
    const double lateral = kTwoPi * p.radius * p.height;
    const double cap = std::numbers::pi * p.radius * p.radius;
    const double t = rng.uniform01() * (lateral + 2.0 * cap);
    const double phi = kTwoPi * rng.uniform01();
    if (t < lateral) {
      const double z = rng.uniform(-0.5, 0.5) * p.height;
      out.push_back(Vec3{p.radius * std::cos(phi), p.radius * std::sin(phi), z});
    } else {
      const double z = t < lateral + cap ? -0.5 * p.height : 0.5 * p.height;
      const double rho = p.radius * std::sqrt(rng.uniform01());
      out.push_back(Vec3{rho * std::cos(phi), rho * std::sin(phi), z});
    }
  }
};

}  // namespace

PointCloud synth_shape(const ShapeParams& params, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidCount, "sample count must be >= 1");
  Rng rng(seed);
  PointCloud out(3);
  out.reserve(n);
  const SurfaceSampler sampler{rng, out};
  for (std::size_t i = 0; i < n; ++i) std::visit(sampler, params);
  return out;
}

}  // namespace bps
