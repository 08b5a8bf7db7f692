#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bps {

using Vec3 = std::array<double, 3>;

enum class ErrorCode {
  EmptyCloud,
  DegenerateCloud,
  DimensionMismatch,
  InvalidResolution,
  InvalidCount,
  InvalidParams,
  InvalidTruncation,
  CloudNotNormalized,
  PointOutOfDomain,
  AttributeCardinalityMismatch,
  BasisMismatch,
  KindMismatch,
  EmptyTrainingSet,
  ZeroAreaMesh,
  MalformedHeader,
  MalformedLine,
  IndexOutOfRange,
  TruncatedFile,
  BadMagic,
  UnsupportedVersion,
  ChecksumMismatch,
  IoError,
};

const char* to_string(ErrorCode code);

/// Every failure in the library is reported as an Error carrying a code and,
/// for parsers, the 1-based line number of the offending input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  /// The message without the code and line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> line_;
};

/// Ordered set of d-dimensional points stored contiguously (point-major).
/// Point order is observable: nearest-neighbor ties resolve to the smaller index.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim) : dim_(dim) {}
  /// Throws DimensionMismatch if coords.size() is not a multiple of dim.
  PointCloud(std::vector<double> coords, std::size_t dim);

  static PointCloud from_points(std::span<const Vec3> points);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator()(std::size_t i, std::size_t axis) const { return coords_[i * dim_ + axis]; }

  Vec3 point3(std::size_t i) const { return {coords_[i * 3], coords_[i * 3 + 1], coords_[i * 3 + 2]}; }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void push_back(std::span<const double> p);
  void push_back(const Vec3& p) { push_back(std::span<const double>(p)); }

  double max_norm() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 3;
};

/// Maps x to (x - centroid) / scale.
struct NormalizationTransform {
  std::vector<double> centroid;
  double scale = 1.0;

  static NormalizationTransform identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), 1.0}; }
};

/// Resolution of the coordinate lattice used by normalize() and the basis
/// generators. Coordinates in [-1, 1] that are multiples of 2^-52 subtract and
/// add exactly, so a delta b + (x - b) reproduces x bit for bit.
inline constexpr double kCoordinateQuantum = 0x1.0p-52;

/// Rounds to the nearest multiple of kCoordinateQuantum (ties to even).
/// Identity for |x| >= 1, where every double already lies on the lattice.
double snap_to_lattice(double x);

/// Denominators below this are treated as a degenerate (single-location) cloud.
inline constexpr double kDegenerateThreshold = 1e-12;

/// Centers the cloud at its mean and scales it so the farthest point has norm 1.
/// Output coordinates are snapped to the coordinate lattice (a change of at
/// most 2^-53 per coordinate).
std::pair<PointCloud, NormalizationTransform> normalize(const PointCloud& cloud);

/// Inverse of normalize: x * scale + centroid.
PointCloud denormalize(const PointCloud& cloud, const NormalizationTransform& t);

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace bps
