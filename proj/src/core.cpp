#include "bps/core.hpp"

#include <algorithm>
#include <cmath>

namespace bps {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DegenerateCloud: return "DegenerateCloud";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidTruncation: return "InvalidTruncation";
    case ErrorCode::CloudNotNormalized: return "CloudNotNormalized";
    case ErrorCode::PointOutOfDomain: return "PointOutOfDomain";
    case ErrorCode::AttributeCardinalityMismatch: return "AttributeCardinalityMismatch";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::ZeroAreaMesh: return "ZeroAreaMesh";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
  std::string out = to_string(code);
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(format_message(code, message, line)), code_(code), detail_(message), line_(line) {}

PointCloud::PointCloud(std::vector<double> coords, std::size_t dim) : coords_(std::move(coords)), dim_(dim) {
  if (dim_ == 0 || coords_.size() % dim_ != 0)
    throw Error(ErrorCode::DimensionMismatch, "coordinate count is not a multiple of the dimension");
}

PointCloud PointCloud::from_points(std::span<const Vec3> points) {
  PointCloud cloud(3);
  cloud.reserve(points.size());
  for (const auto& p : points) cloud.push_back(p);
  return cloud;
}

void PointCloud::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from cloud dimension");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

double PointCloud::max_norm() const {
  double best = 0.0;
  const std::vector<double> origin(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i) best = std::max(best, squared_distance(point(i), origin));
  return std::sqrt(best);
}

double snap_to_lattice(double x) {
  if (!(std::abs(x) < 1.0)) return x;
  return std::nearbyint(x / kCoordinateQuantum) * kCoordinateQuantum;
}

std::pair<PointCloud, NormalizationTransform> normalize(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dim();
  if (n == 0) throw Error(ErrorCode::EmptyCloud, "cannot normalize an empty cloud");

  std::vector<double> centroid(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) centroid[a] += cloud(i, a);
  for (auto& c : centroid) c /= static_cast<double>(n);
  // Second pass on the residuals recovers the rounding lost to a far offset.
  std::vector<double> residual(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) residual[a] += cloud(i, a) - centroid[a];
  for (std::size_t a = 0; a < d; ++a) centroid[a] += residual[a] / static_cast<double>(n);

  std::vector<double> centered(cloud.coords().begin(), cloud.coords().end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) centered[i * d + a] -= centroid[a];

  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t a = 0; a < d; ++a) sq += centered[i * d + a] * centered[i * d + a];
    max_sq = std::max(max_sq, sq);
  }
  const double scale = std::sqrt(max_sq);
  if (!(scale >= kDegenerateThreshold))
    throw Error(ErrorCode::DegenerateCloud, "all points coincide; unit-ball scale is zero");

  for (auto& v : centered) v = snap_to_lattice(v / scale);
  return {PointCloud(std::move(centered), d), NormalizationTransform{std::move(centroid), scale}};
}

PointCloud denormalize(const PointCloud& cloud, const NormalizationTransform& t) {
  if (t.centroid.size() != cloud.dim())
    throw Error(ErrorCode::DimensionMismatch, "transform dimension differs from cloud dimension");
  if (!(t.scale > 0.0)) throw Error(ErrorCode::InvalidParams, "transform scale must be positive");
  const std::size_t d = cloud.dim();
  std::vector<double> out(cloud.coords().begin(), cloud.coords().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * t.scale + t.centroid[i % d];
  return PointCloud(std::move(out), d);
}

}  // namespace bps
