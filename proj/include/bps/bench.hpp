#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bps/basis.hpp"
#include "bps/encode.hpp"
#include "bps/ingest.hpp"

namespace bps {

// ---------------------------------------------------------------------------
// Synthetic dataset

struct SuiteShape {
  std::string id;  // "<kind>-<instance>"
  ShapeKind kind;
  PointCloud cloud;  // normalized
};

/// instances_per_kind shapes of each of the five kinds, n_points each, with
/// per-instance proportions drawn from the seed (torus tube radius, box edges,
/// sheet gap, cylinder radius/height). Order: kind-major, instance-minor.
std::vector<SuiteShape> synthetic_suite(std::size_t instances_per_kind, std::size_t n_points, std::uint64_t seed,
                                        std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Reconstruction sweep

enum class EncoderKind { RawSubsample, Occupancy, BpsDelta };

struct EncoderSpec {
  EncoderKind kind = EncoderKind::BpsDelta;
  BasisStrategy strategy = BasisStrategy::UniformBall;  // BpsDelta only

  /// "raw-subsample", "occupancy" or "bps-delta:<strategy>".
  std::string name() const;
};

std::optional<EncoderSpec> parse_encoder(std::string_view name);

/// Floats actually used by an encoder under budget N:
/// raw 3*floor(N/3); occupancy floor(cbrt N)^3; bps-delta 3*k where k = floor(N/3)
/// (rect grid: largest cube m^3 <= floor(N/3)).
std::size_t encoder_floats(const EncoderSpec& spec, std::size_t budget);

/// Largest m with m^3 <= v.
std::size_t integer_cbrt(std::size_t v);

struct ReconstructionRow {
  std::string shape_id;
  std::string encoder;
  std::size_t budget = 0;  // N, description length in floats
  std::size_t size = 0;    // points kept, grid resolution, or basis size
  double chamfer = 0.0;
  double wall_time_ms = 0.0;
  bool ok = true;
  std::string error;
};

struct ReconstructionReport {
  std::vector<ReconstructionRow> rows;

  /// Median over successful rows; nullopt when none match.
  std::optional<double> median_chamfer(std::string_view encoder, std::size_t budget) const;
  void write_csv(std::ostream& out) const;
};

inline const std::vector<std::size_t> kDefaultBudgets = {24, 81, 192, 375, 648, 1029, 3000, 10125, 30000};

struct SweepConfig {
  std::vector<std::size_t> budgets = kDefaultBudgets;
  std::vector<EncoderSpec> encoders = {
      {EncoderKind::RawSubsample, {}},
      {EncoderKind::Occupancy, {}},
      {EncoderKind::BpsDelta, BasisStrategy::UniformBall},
      {EncoderKind::BpsDelta, BasisStrategy::Hcp},
      {EncoderKind::BpsDelta, BasisStrategy::RectGrid},
      {EncoderKind::BpsDelta, BasisStrategy::BallGrid},
  };
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Encodes, decodes and scores every (shape, encoder, N) cell against the
/// original cloud. Rows come out shape-major, then encoder, then N, whatever
/// the worker count. A failing cell is recorded with ok = false and the sweep
/// continues. One basis per (strategy, N) is shared by all shapes; the
/// uniform-ball basis uses `seed` for every N.
ReconstructionReport run_reconstruction_sweep(std::span<const NamedCloud> dataset, const SweepConfig& config);

// ---------------------------------------------------------------------------
// Throughput

struct ThroughputRow {
  std::size_t n = 0;
  std::size_t k = 0;
  BasisStrategy strategy = BasisStrategy::UniformBall;
  double build_ms = 0.0;  // medians over repetitions
  double query_ms = 0.0;
  double total_ms = 0.0;
  double build_iqr_ms = 0.0;
  double query_iqr_ms = 0.0;
  double total_iqr_ms = 0.0;
  std::size_t workers = 1;
};

struct ThroughputReport {
  std::vector<ThroughputRow> rows;

  const ThroughputRow* find(std::size_t n, std::size_t k) const;
  void write_csv(std::ostream& out) const;
};

struct ThroughputConfig {
  std::vector<std::size_t> n_values = {1000, 10000, 100000};
  std::vector<std::size_t> k_values = {512, 1024, 2048};
  BasisStrategy strategy = BasisStrategy::UniformBall;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Times index build and k basis queries for every (n, k) pair on seeded,
/// normalized sphere-surface clouds. Short operations are repeated inside one
/// timed sample and averaged so each sample spans a measurable interval.
/// Throws InvalidCount for fewer than 3 repetitions.
ThroughputReport run_throughput(const ThroughputConfig& config);

// ---------------------------------------------------------------------------
// 1-NN classification over distance features

struct LabeledEncoding {
  BpsEncoding encoding;
  std::string label;
};

/// Label of the L2-nearest training feature vector for each test item, ties to
/// the smaller training index. Throws EmptyTrainingSet, BasisMismatch
/// (differing basis ids or lengths) or KindMismatch (non-distance encodings).
std::vector<std::string> knn_classify(std::span<const LabeledEncoding> train, std::span<const BpsEncoding> test,
                                      std::size_t workers = 1);

// ---------------------------------------------------------------------------

/// RFC-4180 field quoting.
std::string csv_field(std::string_view s);

double median(std::vector<double> v);

}  // namespace bps
