// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Usage: acceptance [--only AC4,AC5,...]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>

#include "bps/basis.hpp"
#include "bps/bench.hpp"
#include "bps/encode.hpp"
#include "bps/ingest.hpp"
#include "bps/nnsearch.hpp"
#include "bps/parallel.hpp"
#include "bps/random.hpp"
#include "bps/reconstruct.hpp"

using namespace bps;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const Outcome& o, double secs, double limit_secs) {
  const bool in_time = limit_secs <= 0.0 || secs < limit_secs;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s  %s  [%.2fs", id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
  if (limit_secs > 0.0) std::printf(" / limit %.0fs%s", limit_secs, in_time ? "" : " EXCEEDED");
  std::printf("]\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::uint64_t fnv(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ULL;

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  std::vector<double> c(3 * n);
  for (auto& v : c) v = rng.uniform(lo, hi);
  return PointCloud(std::move(c), 3);
}

// ---------------------------------------------------------------------------

Outcome ac1_nn_oracle() {
  std::size_t mismatches = 0, queries = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(derive_seed(101, s));
    const std::size_t n = 1 + rng.uniform_index(2048);
    const auto cloud = random_cloud(n, derive_seed(102, s), -1.0, 1.0);
    const auto basis = generate_uniform_ball(512, 1.0, derive_seed(103, s));
    const SpatialIndex index(cloud);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const auto got = index.nearest(basis.points().point(j));
      const auto want = brute_force_nearest(cloud, basis.points().point(j));
      ++queries;
      worst = std::max(worst, std::abs(got.distance - want.distance));
      if (got.index != want.index || std::abs(got.distance - want.distance) > 1e-12) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(queries) + " queries, " + std::to_string(mismatches) +
                               " mismatches, max |d - d_bf| = " + fmt("%.3g", worst)};
}

Outcome ac2_normalization() {
  double worst_centroid = 0.0, worst_norm = 0.0, worst_invariance = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(derive_seed(201, s));
    const std::size_t n = 2 + rng.uniform_index(500);
    const double spread = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const auto x = random_cloud(n, derive_seed(202, s), -spread, spread);
    const auto y = normalize(x).first;
    double c[3] = {0, 0, 0};
    for (std::size_t i = 0; i < y.size(); ++i)
      for (int a = 0; a < 3; ++a) c[a] += y(i, a);
    for (double& v : c) v /= static_cast<double>(n);
    worst_centroid = std::max(worst_centroid, std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
    worst_norm = std::max(worst_norm, std::abs(y.max_norm() - 1.0));

    const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const double t[3] = {rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
    PointCloud moved(3);
    for (std::size_t i = 0; i < n; ++i)
      moved.push_back(Vec3{scale * x(i, 0) + t[0], scale * x(i, 1) + t[1], scale * x(i, 2) + t[2]});
    const auto z = normalize(moved).first;
    for (std::size_t i = 0; i < y.coords().size(); ++i)
      worst_invariance = std::max(worst_invariance, std::abs(z.coords()[i] - y.coords()[i]));
  }
  const bool pass = worst_centroid <= 1e-9 && worst_norm <= 1e-9 && worst_invariance <= 1e-9;
  return {pass, "max centroid norm " + fmt("%.3g", worst_centroid) + ", max | |x|max - 1 | " + fmt("%.3g", worst_norm) +
                    ", max translation/scale deviation " + fmt("%.3g", worst_invariance) + " (tol 1e-9)"};
}

Outcome ac3_corner_trim() {
  const auto grid = generate_rect_grid(32, 1.0);
  std::size_t outside = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.points().point3(i);
    if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] > 1.0) ++outside;
  }
  const double frac = static_cast<double>(outside) / static_cast<double>(grid.size());
  return {std::abs(frac - 0.476) <= 0.02, "out-of-ball fraction " + fmt("%.4f", frac) + " (target 0.476 +- 0.02)"};
}

// ---------------------------------------------------------------------------
// Criteria 4, 5, 6, 11 share the synthetic suite.

const std::vector<std::size_t> kAcceptanceBudgets = {648, 1029, 3000, 10125};
constexpr std::uint64_t kSuiteSeed = 0;

struct SuiteRun {
  ReconstructionReport report;
  std::uint64_t chamfer_digest = kFnvBasis;
  std::uint64_t decoded_digest = kFnvBasis;
  std::size_t decoded_points = 0;
  std::size_t decoded_members = 0;
  double sweep_secs = 0.0;
};

SuiteRun run_suite(const std::vector<NamedCloud>& data, std::size_t workers) {
  SuiteRun run;
  SweepConfig config;
  config.budgets = kAcceptanceBudgets;
  config.seed = kSuiteSeed;
  config.workers = workers;
  const auto t0 = Clock::now();
  run.report = run_reconstruction_sweep(data, config);
  run.sweep_secs = seconds_since(t0);
  for (const auto& r : run.report.rows) run.chamfer_digest = fnv(run.chamfer_digest, std::bit_cast<std::uint64_t>(r.chamfer));

  // Delta membership over every bps-delta cell of the sweep.
  std::vector<std::pair<const BasisPointSet*, std::size_t>> jobs;
  std::vector<BasisPointSet> bases;
  for (const auto& spec : config.encoders) {
    if (spec.kind != EncoderKind::BpsDelta) continue;
    for (std::size_t budget : config.budgets) {
      const std::size_t k = spec.strategy == BasisStrategy::RectGrid ? integer_cbrt(budget / 3) : budget / 3;
      switch (spec.strategy) {
        case BasisStrategy::RectGrid: bases.push_back(generate_rect_grid(k)); break;
        case BasisStrategy::BallGrid: bases.push_back(generate_ball_grid(k)); break;
        case BasisStrategy::UniformBall: bases.push_back(generate_uniform_ball(k, 1.0, kSuiteSeed)); break;
        case BasisStrategy::Hcp: bases.push_back(generate_hcp(k)); break;
      }
    }
  }
  struct Cell {
    std::size_t points = 0, members = 0;
    std::uint64_t digest = kFnvBasis;
  };
  std::vector<Cell> cells(data.size() * bases.size());
  parallel_for(cells.size(), workers, [&](std::size_t c) {
    const auto& cloud = data[c / bases.size()].cloud;
    const auto& basis = bases[c % bases.size()];
    std::unordered_set<std::uint64_t> members;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      std::uint64_t h = kFnvBasis;
      for (double v : cloud.point(i)) h = fnv(h, std::bit_cast<std::uint64_t>(v));
      members.insert(h);
    }
    const auto decoded = decode_delta(encode_bps_delta(cloud, basis), basis);
    Cell& cell = cells[c];
    for (std::size_t i = 0; i < decoded.size(); ++i) {
      std::uint64_t h = kFnvBasis;
      for (double v : decoded.point(i)) h = fnv(h, std::bit_cast<std::uint64_t>(v));
      cell.digest = fnv(cell.digest, h);
      ++cell.points;
      // Hash hit, then confirm with an exact coordinate comparison.
      if (!members.contains(h)) continue;
      const auto p = decoded.point(i);
      for (std::size_t j = 0; j < cloud.size(); ++j)
        if (std::equal(p.begin(), p.end(), cloud.point(j).begin())) {
          ++cell.members;
          break;
        }
    }
  });
  for (const auto& c : cells) {
    run.decoded_points += c.points;
    run.decoded_members += c.members;
    run.decoded_digest = fnv(run.decoded_digest, c.digest);
  }
  return run;
}

Outcome ac4_superiority(const SuiteRun& run) {
  bool pass = true;
  std::string detail;
  for (std::size_t n : kAcceptanceBudgets) {
    const double bps = run.report.median_chamfer("bps-delta:uniform-ball", n).value_or(NAN);
    const double occ = run.report.median_chamfer("occupancy", n).value_or(NAN);
    const double ratio = bps / occ;
    pass = pass && ratio <= 0.5;
    detail += "N=" + std::to_string(n) + " ratio " + fmt("%.3f", ratio) + (ratio <= 0.5 ? "" : "(>0.5)") + "; ";
  }
  return {pass, "median bps-delta:uniform-ball / occupancy: " + detail};
}

Outcome ac5_strategy_order(const SuiteRun& run) {
  bool pass = true;
  std::string detail;
  for (std::size_t n : kAcceptanceBudgets) {
    const double uni = run.report.median_chamfer("bps-delta:uniform-ball", n).value_or(NAN);
    const double hcp = run.report.median_chamfer("bps-delta:hcp", n).value_or(NAN);
    const double rect = run.report.median_chamfer("bps-delta:rect-grid", n).value_or(NAN);
    const double gap = std::abs(uni - hcp) / std::min(uni, hcp);
    const bool ok = uni <= rect && hcp <= rect && gap <= 0.15;
    pass = pass && ok;
    detail += "k=" + std::to_string(n / 3) + " uni " + fmt("%.3e", uni) + " hcp " + fmt("%.3e", hcp) + " rect " +
              fmt("%.3e", rect) + " gap " + fmt("%.0f%%", 100 * gap) + (ok ? "" : " (x)") + "; ";
  }
  return {pass, detail};
}

Outcome ac6_membership(const SuiteRun& run) {
  return {run.decoded_points > 0 && run.decoded_points == run.decoded_members,
          std::to_string(run.decoded_members) + "/" + std::to_string(run.decoded_points) +
              " decoded points are bit-exact cloud members"};
}

// ---------------------------------------------------------------------------

double chamfer_brute(const PointCloud& a, const PointCloud& b) {
  auto one_way = [](const PointCloud& x, const PointCloud& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = INFINITY;
      for (std::size_t j = 0; j < y.size(); ++j) best = std::min(best, squared_distance(x.point(i), y.point(j)));
      sum += best;
    }
    return sum / static_cast<double>(x.size());
  };
  return one_way(a, b) + one_way(b, a);
}

Outcome ac7_chamfer() {
  double asym = 0.0, self = 0.0, vs_brute = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(derive_seed(701, s));
    const auto a = random_cloud(1 + rng.uniform_index(1500), derive_seed(702, s), -1, 1);
    const auto b = random_cloud(1 + rng.uniform_index(1500), derive_seed(703, s), -1, 1);
    const double ab = chamfer(a, b);
    asym = std::max(asym, std::abs(ab - chamfer(b, a)));
    self = std::max(self, std::max(chamfer(a, a), chamfer(b, b)));
    vs_brute = std::max(vs_brute, std::abs(ab - chamfer_brute(a, b)));
  }
  return {asym <= 1e-12 && self == 0.0 && vs_brute <= 1e-12,
          "50 pairs: max asymmetry " + fmt("%.3g", asym) + ", max chamfer(X,X) " + fmt("%.3g", self) +
              ", max |index - brute| " + fmt("%.3g", vs_brute)};
}

Outcome ac8_scaling() {
  ThroughputConfig build_cfg;
  build_cfg.n_values = {1000, 2000, 10000, 20000, 100000, 200000};
  build_cfg.k_values = {1024};
  build_cfg.repetitions = 10;
  build_cfg.seed = 8;
  build_cfg.workers = 1;
  const auto build = run_throughput(build_cfg);

  ThroughputConfig query_cfg = build_cfg;
  query_cfg.n_values = {10000};
  query_cfg.k_values = {512, 1024, 2048};
  const auto query = run_throughput(query_cfg);

  bool pass = true;
  std::string detail = "build growth on doubling n:";
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const double f = build.find(2 * n, 1024)->build_ms / build.find(n, 1024)->build_ms;
    pass = pass && f <= 2.6;
    detail += " " + std::to_string(n) + "->" + std::to_string(2 * n) + " x" + fmt("%.2f", f);
  }
  detail += " (<= 2.6); query growth on doubling k:";
  for (std::size_t k : {512u, 1024u}) {
    const double f = query.find(10000, 2 * k)->query_ms / query.find(10000, k)->query_ms;
    pass = pass && f >= 1.7 && f <= 2.3;
    detail += " " + std::to_string(k) + "->" + std::to_string(2 * k) + " x" + fmt("%.2f", f);
  }
  const auto* ref = query.find(10000, 1024);
  detail += " ([1.7, 2.3]); n=1e4 k=1024 single-worker encode " + fmt("%.2f", ref->total_ms) + " ms (target <= 50, reported)";
  return {pass, detail};
}

struct ClassifyRun {
  double accuracy = 0.0;
  std::uint64_t digest = kFnvBasis;
};

ClassifyRun run_classification(std::size_t workers) {
  const auto suite = synthetic_suite(200, 2048, 9, workers);
  const auto basis = generate_uniform_ball(512, 1.0, 42);
  std::vector<PointCloud> train_clouds, test_clouds;
  std::vector<std::string> train_labels, test_labels;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const bool train = (i % 200) < 100;
    (train ? train_clouds : test_clouds).push_back(suite[i].cloud);
    (train ? train_labels : test_labels).emplace_back(to_string(suite[i].kind));
  }
  const auto train_enc = encode_batch(train_clouds, basis, EncodingKind::Distance, workers);
  const auto test_enc = encode_batch(test_clouds, basis, EncodingKind::Distance, workers);
  std::vector<LabeledEncoding> labeled;
  for (std::size_t i = 0; i < train_enc.size(); ++i) labeled.push_back({train_enc[i], train_labels[i]});
  const auto predicted = knn_classify(labeled, test_enc, workers);
  ClassifyRun run;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    correct += predicted[i] == test_labels[i] ? 1 : 0;
    for (char ch : predicted[i]) run.digest = fnv(run.digest, static_cast<unsigned char>(ch));
  }
  run.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  return run;
}

Outcome ac9_classification(const ClassifyRun& run) {
  return {run.accuracy >= 0.95, "1-NN accuracy " + fmt("%.3f", run.accuracy) + " on 500 test shapes (>= 0.95)"};
}

Outcome ac10_formats() {
  std::vector<std::string> problems;
  // BPK
  const auto cloud = normalize(random_cloud(5000, 1001, -2, 3)).first;
  const auto basis = generate_uniform_ball(1024, 1.0, 1002);
  std::vector<std::string> blobs = {to_bpk(basis), to_bpk(generate_hcp(300)), to_bpk(generate_rect_grid(6)),
                                    to_bpk(encode_bps_distance(cloud, basis)), to_bpk(encode_bps_delta(cloud, basis)),
                                    to_bpk(encode_occupancy(cloud, 16)), to_bpk(encode_tdf(cloud, 12))};
  std::size_t bpk_ok = 0;
  for (const auto& b : blobs) {
    const std::string again = std::visit(
        [](const auto& rec) -> std::string { return to_bpk(rec); }, from_bpk(b));
    bpk_ok += again == b ? 1 : 0;
  }
  const auto reloaded = std::get<BasisPointSet>(from_bpk(blobs[0]));
  const auto reloaded_delta = std::get<BpsEncoding>(from_bpk(blobs[4]));
  const auto delta = encode_bps_delta(cloud, basis);
  if (!(reloaded == basis) || reloaded_delta.values != delta.values) problems.push_back("BPK value mismatch");
  if (bpk_ok != blobs.size()) problems.push_back("BPK bytes differ after reload");

  // XYZ
  const auto big = random_cloud(10000, 1003, -1, 1);
  std::stringstream ss;
  write_xyz(ss, big);
  const auto back = read_xyz(ss);
  double xyz_err = 0.0;
  for (std::size_t i = 0; i < big.coords().size(); ++i)
    xyz_err = std::max(xyz_err, std::abs(back.coords()[i] - big.coords()[i]));
  if (!(xyz_err < 1e-6)) problems.push_back("XYZ error " + fmt("%.3g", xyz_err));

  // OFF corpus
  const std::filesystem::path data = BPS_TEST_DATA_DIR;
  struct Good {
    const char* file;
    std::size_t v, f;
  };
  std::size_t off_ok = 0;
  for (const auto& g : {Good{"tetra.off", 4, 4}, Good{"fused_header.off", 4, 4}, Good{"quad.off", 4, 2}}) {
    const auto mesh = read_off_file(data / g.file);
    if (mesh.vertices.size() == g.v && mesh.faces.size() == g.f)
      ++off_ok;
    else
      problems.push_back(std::string(g.file) + " counts");
  }
  struct Bad {
    const char* file;
    ErrorCode code;
    std::size_t line;
  };
  std::size_t located = 0;
  for (const auto& b : {Bad{"bad_header.off", ErrorCode::MalformedHeader, 1},
                        Bad{"bad_counts.off", ErrorCode::MalformedHeader, 2},
                        Bad{"truncated.off", ErrorCode::TruncatedFile, 9},
                        Bad{"index_out_of_range.off", ErrorCode::IndexOutOfRange, 7},
                        Bad{"bad_vertex.off", ErrorCode::MalformedLine, 4}}) {
    try {
      read_off_file(data / b.file);
      problems.push_back(std::string(b.file) + " parsed");
    } catch (const Error& e) {
      if (e.code() == b.code && e.line() == b.line)
        ++located;
      else
        problems.push_back(std::string(b.file) + ": " + e.what());
    }
  }
  std::string detail = "BPK " + std::to_string(bpk_ok) + "/" + std::to_string(blobs.size()) +
                       " bit-identical; XYZ max error " + fmt("%.3g", xyz_err) + "; OFF " + std::to_string(off_ok) +
                       "/3 parsed, " + std::to_string(located) + "/5 malformed located";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::unordered_set<std::string> only;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      for (std::string id; std::getline(ss, id, ',');) only.insert(id);
    }
  auto want = [&](const char* id) { return only.empty() || only.contains(id); };
  auto timed = [](const char* id, double limit, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    const Outcome o = fn();
    report(id, o, seconds_since(t0), limit);
  };

  const std::size_t max_workers = std::max<std::size_t>(default_workers(), 4);
  std::printf("workers: 1 and %zu (hardware reports %zu)\n", max_workers, default_workers());

  if (want("AC1")) timed("AC1", 30, ac1_nn_oracle);
  if (want("AC2")) timed("AC2", 10, ac2_normalization);
  if (want("AC3")) timed("AC3", 1, ac3_corner_trim);

  const bool suite = want("AC4") || want("AC5") || want("AC6") || want("AC11");
  SuiteRun first, second, wide;
  if (suite) {
    const auto t0 = Clock::now();
    std::vector<NamedCloud> data;
    for (auto& s : synthetic_suite(20, 10000, kSuiteSeed, 1)) data.push_back({std::move(s.id), std::move(s.cloud)});
    const double build_secs = seconds_since(t0);
    first = run_suite(data, 1);
    const double desk_secs = build_secs + first.sweep_secs;
    std::printf("suite: 100 shapes x 10^4 points, budgets 648/1029/3000/10125, sweep %.1fs\n", first.sweep_secs);
    if (want("AC4")) report("AC4", ac4_superiority(first), desk_secs, 300);
    if (want("AC5")) report("AC5", ac5_strategy_order(first), desk_secs, 300);
    if (want("AC6")) report("AC6", ac6_membership(first), seconds_since(t0), 0);
  }

  ClassifyRun cls_first;
  if (want("AC9") || want("AC11")) {
    const auto t0 = Clock::now();
    cls_first = run_classification(1);
    if (want("AC9")) report("AC9", ac9_classification(cls_first), seconds_since(t0), 0);
  }

  if (want("AC7")) timed("AC7", 30, ac7_chamfer);
  if (want("AC8")) timed("AC8", 0, ac8_scaling);
  if (want("AC10")) timed("AC10", 0, ac10_formats);

  if (want("AC11")) {
    const auto t0 = Clock::now();
    std::vector<NamedCloud> data;
    for (auto& s : synthetic_suite(20, 10000, kSuiteSeed, max_workers))
      data.push_back({std::move(s.id), std::move(s.cloud)});
    second = run_suite(data, 1);
    wide = run_suite(data, max_workers);
    const auto cls_second = run_classification(1);
    const auto cls_wide = run_classification(max_workers);
    const bool sweep_same = first.chamfer_digest == second.chamfer_digest && first.chamfer_digest == wide.chamfer_digest;
    const bool decoded_same = first.decoded_digest == second.decoded_digest && first.decoded_digest == wide.decoded_digest;
    const bool cls_same = cls_first.digest == cls_second.digest && cls_first.digest == cls_wide.digest;
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "runs x2 and workers {1, %zu}: sweep chamfers %s, decoded points %s, 1-NN labels %s", max_workers,
                  sweep_same ? "identical" : "DIFFER", decoded_same ? "identical" : "DIFFER",
                  cls_same ? "identical" : "DIFFER");
    report("AC11", {sweep_same && decoded_same && cls_same, detail}, seconds_since(t0), 0);
  }

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures);
  return failures == 0 ? 0 : 1;
}
