#include "bps/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "bps/kernels.hpp"
#include "bps/nnsearch.hpp"
#include "bps/parallel.hpp"
#include "bps/random.hpp"
#include "bps/reconstruct.hpp"

namespace bps {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

ShapeParams suite_params(ShapeKind kind, Rng& rng) {
  switch (kind) {
    case ShapeKind::Sphere: return SphereParams{1.0};
    case ShapeKind::Torus: return TorusParams{1.0, rng.uniform(0.2, 0.5)};
    case ShapeKind::Box: return BoxParams{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
    case ShapeKind::TwoSidedSheet: return SheetParams{2.0, rng.uniform(0.1, 0.6)};
    case ShapeKind::Cylinder: return CylinderParams{rng.uniform(0.3, 0.7), rng.uniform(1.0, 2.0)};
  }
  return SphereParams{};
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::InvalidCount, "median of an empty sample");
  return quantile(std::move(v), 0.5);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<SuiteShape> synthetic_suite(std::size_t instances_per_kind, std::size_t n_points, std::uint64_t seed,
                                        std::size_t workers) {
  constexpr ShapeKind kKinds[] = {ShapeKind::Sphere, ShapeKind::Torus, ShapeKind::Box, ShapeKind::TwoSidedSheet,
                                  ShapeKind::Cylinder};
  std::vector<SuiteShape> out(std::size(kKinds) * instances_per_kind);
  parallel_for(out.size(), workers, [&](std::size_t s) {
    const ShapeKind kind = kKinds[s / instances_per_kind];
    const std::size_t instance = s % instances_per_kind;
    Rng param_rng(derive_seed(seed, static_cast<std::uint64_t>(kind), 2 * instance));
    const ShapeParams params = suite_params(kind, param_rng);
    const PointCloud raw = synth_shape(params, n_points, derive_seed(seed, static_cast<std::uint64_t>(kind), 2 * instance + 1));
    out[s] = {std::string(to_string(kind)) + "-" + std::to_string(instance), kind, normalize(raw).first};
  });
  return out;
}

// ---------------------------------------------------------------------------

std::string EncoderSpec::name() const {
  switch (kind) {
    case EncoderKind::RawSubsample: return "raw-subsample";
    case EncoderKind::Occupancy: return "occupancy";
    case EncoderKind::BpsDelta: return "bps-delta:" + std::string(to_string(strategy));
  }
  return "unknown";
}

std::optional<EncoderSpec> parse_encoder(std::string_view name) {
  if (name == "raw-subsample" || name == "raw") return EncoderSpec{EncoderKind::RawSubsample, {}};
  if (name == "occupancy") return EncoderSpec{EncoderKind::Occupancy, {}};
  constexpr std::string_view prefix = "bps-delta:";
  if (name.substr(0, prefix.size()) == prefix) {
    if (auto s = parse_strategy(name.substr(prefix.size()))) return EncoderSpec{EncoderKind::BpsDelta, *s};
  }
  return std::nullopt;
}

std::size_t integer_cbrt(std::size_t v) {
  auto m = static_cast<std::size_t>(std::cbrt(static_cast<double>(v)));
  while (m > 0 && m * m * m > v) --m;
  while ((m + 1) * (m + 1) * (m + 1) <= v) ++m;
  return m;
}

namespace {

// Points kept / grid resolution / basis size under budget N.
std::size_t encoder_size(const EncoderSpec& spec, std::size_t budget) {
  switch (spec.kind) {
    case EncoderKind::RawSubsample: return budget / 3;
    case EncoderKind::Occupancy: return integer_cbrt(budget);
    case EncoderKind::BpsDelta:
      return spec.strategy == BasisStrategy::RectGrid ? integer_cbrt(budget / 3) : budget / 3;
  }
  return 0;
}

BasisPointSet make_basis(BasisStrategy strategy, std::size_t size, std::uint64_t seed) {
  switch (strategy) {
    case BasisStrategy::RectGrid: return generate_rect_grid(size);
    case BasisStrategy::BallGrid: return generate_ball_grid(size);
    case BasisStrategy::UniformBall: return generate_uniform_ball(size, 1.0, seed);
    case BasisStrategy::Hcp: return generate_hcp(size);
  }
  throw Error(ErrorCode::InvalidParams, "unknown basis strategy");
}

}  // namespace

std::size_t encoder_floats(const EncoderSpec& spec, std::size_t budget) {
  const std::size_t s = encoder_size(spec, budget);
  switch (spec.kind) {
    case EncoderKind::RawSubsample: return 3 * s;
    case EncoderKind::Occupancy: return s * s * s;
    case EncoderKind::BpsDelta: return spec.strategy == BasisStrategy::RectGrid ? 3 * s * s * s : 3 * s;
  }
  return 0;
}

std::optional<double> ReconstructionReport::median_chamfer(std::string_view encoder, std::size_t budget) const {
  std::vector<double> v;
  for (const auto& row : rows)
    if (row.ok && row.encoder == encoder && row.budget == budget) v.push_back(row.chamfer);
  if (v.empty()) return std::nullopt;
  return median(std::move(v));
}

void ReconstructionReport::write_csv(std::ostream& out) const {
  out << "shape_id,encoder,N,size,chamfer,wall_time_ms,status,error\n";
  for (const auto& r : rows) {
    out << csv_field(r.shape_id) << ',' << csv_field(r.encoder) << ',' << r.budget << ',' << r.size << ','
        << (r.ok ? format_double(r.chamfer) : "") << ',' << format_double(r.wall_time_ms) << ','
        << (r.ok ? "ok" : "failed") << ',' << csv_field(r.error) << '\n';
  }
}

ReconstructionReport run_reconstruction_sweep(std::span<const NamedCloud> dataset, const SweepConfig& config) {
  for (std::size_t budget : config.budgets)
    if (budget < 24) throw Error(ErrorCode::InvalidCount, "encoding budgets must be >= 24 floats");

  // Shared bases, built once per (strategy, N). A basis that cannot be built
  // fails its cells rather than the sweep.
  std::map<std::pair<BasisStrategy, std::size_t>, std::optional<BasisPointSet>> bases;
  std::map<std::pair<BasisStrategy, std::size_t>, std::string> basis_errors;
  for (const auto& spec : config.encoders) {
    if (spec.kind != EncoderKind::BpsDelta) continue;
    for (std::size_t budget : config.budgets) {
      const auto key = std::make_pair(spec.strategy, budget);
      if (bases.contains(key)) continue;
      try {
        bases.emplace(key, make_basis(spec.strategy, encoder_size(spec, budget), config.seed));
      } catch (const Error& e) {
        bases.emplace(key, std::nullopt);
        basis_errors[key] = e.what();
      }
    }
  }

  const std::size_t n_enc = config.encoders.size();
  const std::size_t n_budget = config.budgets.size();
  ReconstructionReport report;
  report.rows.resize(dataset.size() * n_enc * n_budget);

  parallel_for(report.rows.size(), config.workers, [&](std::size_t cell) {
    const std::size_t s = cell / (n_enc * n_budget);
    const EncoderSpec& spec = config.encoders[(cell / n_budget) % n_enc];
    const std::size_t budget = config.budgets[cell % n_budget];
    const PointCloud& cloud = dataset[s].cloud;

    ReconstructionRow& row = report.rows[cell];
    row.shape_id = dataset[s].id;
    row.encoder = spec.name();
    row.budget = budget;
    row.size = encoder_size(spec, budget);

    const auto start = Clock::now();
    try {
      PointCloud decoded;
      switch (spec.kind) {
        case EncoderKind::RawSubsample:
          decoded = decode_subsample(cloud, std::min(row.size, cloud.size()), derive_seed(config.seed, s, budget));
          break;
        case EncoderKind::Occupancy:
          decoded = decode_occupancy(encode_occupancy(cloud, row.size));
          break;
        case EncoderKind::BpsDelta: {
          const auto key = std::make_pair(spec.strategy, budget);
          const auto& basis = bases.at(key);
          if (!basis) throw Error(ErrorCode::InvalidParams, basis_errors.at(key));
          decoded = decode_delta(encode_bps_delta(cloud, *basis), *basis);
          break;
        }
      }
      row.chamfer = chamfer(cloud, decoded);
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.wall_time_ms = elapsed_ms(start);
  });
  return report;
}

// ---------------------------------------------------------------------------

const ThroughputRow* ThroughputReport::find(std::size_t n, std::size_t k) const {
  for (const auto& r : rows)
    if (r.n == n && r.k == k) return &r;
  return nullptr;
}

void ThroughputReport::write_csv(std::ostream& out) const {
  out << "n,k,strategy,build_ms,query_ms,total_ms,build_iqr_ms,query_iqr_ms,total_iqr_ms,worker_count\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.k << ',' << to_string(r.strategy) << ',' << format_double(r.build_ms) << ','
        << format_double(r.query_ms) << ',' << format_double(r.total_ms) << ',' << format_double(r.build_iqr_ms)
        << ',' << format_double(r.query_iqr_ms) << ',' << format_double(r.total_iqr_ms) << ',' << r.workers << '\n';
  }
}

ThroughputReport run_throughput(const ThroughputConfig& config) {
  if (config.repetitions < 3) throw Error(ErrorCode::InvalidCount, "throughput needs at least 3 repetitions");
  // Each timed sample covers at least this many points (build) or queries.
  constexpr std::size_t kMinWorkPerSample = 200000;

  ThroughputReport report;
  for (std::size_t n : config.n_values) {
    const PointCloud cloud = normalize(synth_shape(SphereParams{}, n, derive_seed(config.seed, n))).first;
    for (std::size_t k : config.k_values) {
      const BasisPointSet basis = make_basis(
          config.strategy,
          config.strategy == BasisStrategy::RectGrid ? std::max<std::size_t>(2, integer_cbrt(k)) : k, config.seed);
      const std::size_t build_inner = std::max<std::size_t>(1, kMinWorkPerSample / n);
      const std::size_t query_inner = std::max<std::size_t>(1, kMinWorkPerSample / 10 / basis.size());

      std::vector<double> build(config.repetitions), query(config.repetitions), total(config.repetitions);
      std::size_t sink = 0;
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        auto start = Clock::now();
        for (std::size_t i = 0; i < build_inner; ++i) sink += SpatialIndex(cloud).node_count();
        build[rep] = elapsed_ms(start) / static_cast<double>(build_inner);

        const SpatialIndex index(cloud);
        start = Clock::now();
        for (std::size_t i = 0; i < query_inner; ++i) {
          const auto hits = index.nearest_all(basis.points(), config.workers);
          sink += hits.back().index;
        }
        query[rep] = elapsed_ms(start) / static_cast<double>(query_inner);
        total[rep] = build[rep] + query[rep];
      }
      if (sink == 0xdeadbeef) std::fputc('\n', stderr);  // keeps the timed work observable

      const auto iqr = [](const std::vector<double>& v) { return quantile(v, 0.75) - quantile(v, 0.25); };
      report.rows.push_back({n, basis.size(), config.strategy, median(build), median(query), median(total), iqr(build),
                             iqr(query), iqr(total), config.workers});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<std::string> knn_classify(std::span<const LabeledEncoding> train, std::span<const BpsEncoding> test,
                                      std::size_t workers) {
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "1-NN needs at least one training item");
  const std::uint64_t id = train.front().encoding.basis_id;
  const std::size_t len = train.front().encoding.values.size();
  const auto check = [&](const BpsEncoding& e) {
    if (e.kind != EncodingKind::Distance) throw Error(ErrorCode::KindMismatch, "1-NN uses distance encodings");
    if (e.basis_id != id || e.values.size() != len)
      throw Error(ErrorCode::BasisMismatch, "all encodings must share one basis");
  };
  for (const auto& t : train) check(t.encoding);
  for (const auto& e : test) check(e);

  const auto& kern = kernels::active();
  std::vector<std::string> out(test.size());
  parallel_for(test.size(), workers, [&](std::size_t q) {
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < train.size(); ++t) {
      const double sq = kern.squared_l2(test[q].values.data(), train[t].encoding.values.data(), len);
      if (sq < best_sq) {
        best_sq = sq;
        best = t;
      }
    }
    out[q] = train[best].label;
  });
  return out;
}

}  // namespace bps
