#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bps/basis.hpp"
#include "bps/core.hpp"
#include "bps/encode.hpp"

namespace bps {

// ---------------------------------------------------------------------------
// Meshes

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 3>> faces;

  double face_area(std::size_t f) const;
  double area() const;
};

/// Parses an OFF mesh. Accepts "OFF" on its own line, the counts fused onto the
/// header ("OFF1234 5678 0", as found in ModelNet) or following it on the same
/// line, '#' comments, blank lines and arbitrary whitespace. Polygons are
/// fan-triangulated as (v0, v_i, v_i+1); triangles with repeated indices are
/// dropped. Extra per-vertex or per-face fields (colors) are ignored.
///
/// Errors carry the 1-based line number: MalformedHeader, MalformedLine,
/// IndexOutOfRange, TruncatedFile.
TriangleMesh parse_off(std::istream& in);
TriangleMesh parse_off(std::string_view text);
TriangleMesh read_off_file(const std::filesystem::path& path);

struct SurfaceSample {
  PointCloud points;
  std::vector<std::size_t> faces;  // source face of each point
};

/// n points uniform on the mesh surface: a face is drawn with probability
/// proportional to its area, then a point inside it by the square-root
/// barycentric map p = (1 - sqrt(u)) a + sqrt(u)(1 - v) b + sqrt(u) v c.
SurfaceSample sample_surface_with_faces(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic shapes

enum class ShapeKind : std::uint8_t { Sphere, Torus, Box, TwoSidedSheet, Cylinder };

std::string_view to_string(ShapeKind kind);
std::optional<ShapeKind> parse_shape_kind(std::string_view name);

struct SphereParams {
  double radius = 1.0;
};
struct TorusParams {
  double major = 1.0;
  double minor = 0.3;
};
/// Axis-aligned, centered; full edge lengths.
struct BoxParams {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;
};
/// Two parallel square sheets of side `side` at z = +-gap/2.
struct SheetParams {
  double side = 2.0;
  double gap = 0.2;
};
/// Closed cylinder along z (lateral surface plus both caps).
struct CylinderParams {
  double radius = 0.5;
  double height = 1.5;
};

using ShapeParams = std::variant<SphereParams, TorusParams, BoxParams, SheetParams, CylinderParams>;

ShapeParams default_params(ShapeKind kind);
ShapeKind kind_of(const ShapeParams& params);

/// n points uniform over the shape's surface area. Throws InvalidParams.
PointCloud synth_shape(const ShapeParams& params, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// XYZ text clouds: one "x y z" per line, '#' comments. Writes the shortest
// decimal form that reads back to the same double, so round trips are exact.

PointCloud read_xyz(std::istream& in);
void write_xyz(std::ostream& out, const PointCloud& cloud);
PointCloud read_xyz_file(const std::filesystem::path& path);
void write_xyz_file(const std::filesystem::path& path, const PointCloud& cloud);

// ---------------------------------------------------------------------------
// BPK binary container
//
// Little-endian throughout:
//   "BPSK" | version u16 | record kind u8 | kind-specific body | CRC32 u32
// CRC32 (zlib polynomial) covers every preceding byte.
//
//   basis (kind 0):    strategy u8, dim u32, k u32, radius f64, seed u64,
//                      basis_id u64, coordinates f64[k*dim]
//   distance enc (1):  dim u32, k u32, basis_id u64, width u8, source_size u64,
//   delta enc (2)      has_nearest u8, attribute_width u32, values real[k or k*dim],
//                      nearest u64[k] (if has_nearest), attributes real[k*attribute_width]
//   voxel grid (3):    grid kind u8, m u32, truncation f64, width u8, cells real[m^3]
//
// "real" is f32 or f64 per the width byte (4 or 8). Lossless writes pick f32
// when every value survives the float round trip (occupancy grids always do)
// and f64 otherwise; F32 forces the compact form. Basis coordinates are always
// f64 so a reloaded basis hashes to the same basis_id.

inline constexpr std::uint16_t kBpkVersion = 1;

enum class BpkKind : std::uint8_t { Basis = 0, DistanceEncoding = 1, DeltaEncoding = 2, VoxelGrid = 3 };

using BpkRecord = std::variant<BasisPointSet, BpsEncoding, VoxelGrid>;

std::string to_bpk(const BasisPointSet& basis);
enum class BpkPrecision : std::uint8_t { Lossless, F32 };

std::string to_bpk(const BasisPointSet& basis);
std::string to_bpk(const BpsEncoding& enc, BpkPrecision precision = BpkPrecision::Lossless);
std::string to_bpk(const VoxelGrid& grid, BpkPrecision precision = BpkPrecision::Lossless);
BpkRecord from_bpk(std::string_view bytes);

void write_bpk(std::ostream& out, const BpkRecord& record, BpkPrecision precision = BpkPrecision::Lossless);
BpkRecord read_bpk(std::istream& in);
void write_bpk_file(const std::filesystem::path& path, const BpkRecord& record,
                    BpkPrecision precision = BpkPrecision::Lossless);
BpkRecord read_bpk_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Datasets

struct NamedCloud {
  std::string id;
  PointCloud cloud;
};

/// Loads every .off (surface-sampled to n_points) and .xyz file under dir,
/// recursively, sorted by relative path; ids are relative paths without the
/// extension. limit > 0 keeps a seeded random subset of that many files (still
/// in path order). OFF sampling seeds derive from (seed, position in the result).
std::vector<NamedCloud> load_cloud_dir(const std::filesystem::path& dir, std::size_t n_points, std::uint64_t seed,
                                       std::size_t limit = 0);

}  // namespace bps
