// bps: command-line front end for basis point set encoding.
//
// stdout carries machine output only (values, CSV, XYZ); diagnostics go to
// stderr. Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bps/basis.hpp"
#include "bps/bench.hpp"
#include "bps/encode.hpp"
#include "bps/ingest.hpp"
#include "bps/kernels.hpp"
#include "bps/parallel.hpp"
#include "bps/random.hpp"
#include "bps/reconstruct.hpp"

namespace fs = std::filesystem;
using namespace bps;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = default_workers();
  std::string simd;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "-" or empty means stdout.
template <class Fn>
void write_text(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  fn(out);
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

PointCloud read_cloud(const std::string& path) {
  if (path == "-") return read_xyz(std::cin);
  return read_xyz_file(path);
}

BasisPointSet read_basis(const std::string& path) {
  auto rec = read_bpk_file(path);
  if (auto* b = std::get_if<BasisPointSet>(&rec)) return std::move(*b);
  throw Error(ErrorCode::KindMismatch, path + ": expected a basis record");
}

// ---------------------------------------------------------------------------

struct GenBasisArgs {
  std::string strategy;
  std::size_t k = 0;
  std::size_t m = 0;
  double radius = 1.0;
  std::string out;
};

void run_gen_basis(const GenBasisArgs& a, const Globals& g) {
  const auto strategy = parse_strategy(a.strategy);
  if (!strategy) throw UsageError("unknown --strategy '" + a.strategy + "'");
  BasisPointSet basis = [&] {
    if (*strategy == BasisStrategy::RectGrid) {
      std::size_t m = a.m;
      if (m == 0 && a.k > 0) {
        m = integer_cbrt(a.k);
        if (m * m * m != a.k) throw UsageError("rect grid needs --m, or a --k that is a perfect cube");
      }
      if (m == 0) throw UsageError("rect grid needs --m");
      return generate_rect_grid(m, a.radius);
    }
    if (a.k == 0) throw UsageError("--k is required for strategy " + a.strategy);
    switch (*strategy) {
      case BasisStrategy::BallGrid: return generate_ball_grid(a.k, a.radius);
      case BasisStrategy::UniformBall: return generate_uniform_ball(a.k, a.radius, g.seed);
      default: return generate_hcp(a.k, a.radius);
    }
  }();
  write_bpk_file(a.out, basis);
  std::cerr << "wrote " << to_string(basis.strategy()) << " basis, k = " << basis.size() << ", to " << a.out << "\n";
}

struct SampleArgs {
  std::string in;
  std::string kind;
  std::size_t n = 2048;
  bool normalize = false;
  std::string out;
};

void emit_cloud(PointCloud cloud, bool norm, const std::string& out) {
  if (norm) cloud = normalize(cloud).first;
  write_text(out, [&](std::ostream& s) { write_xyz(s, cloud); });
}

void run_sample_mesh(const SampleArgs& a, const Globals& g) {
  emit_cloud(sample_surface(read_off_file(a.in), a.n, g.seed), a.normalize, a.out);
}

void run_synth(const SampleArgs& a, const Globals& g) {
  const auto kind = parse_shape_kind(a.kind);
  if (!kind) throw UsageError("unknown --kind '" + a.kind + "'");
  emit_cloud(synth_shape(default_params(*kind), a.n, g.seed), a.normalize, a.out);
}

struct EncodeArgs {
  std::string in;
  std::string basis;
  std::string kind = "distance";
  std::size_t m = 0;
  double tau = 0.0;
  bool allow_unnormalized = false;
  bool f32 = false;
  std::string out;
};

void run_encode(const EncodeArgs& a, const Globals& g) {
  const PointCloud cloud = read_cloud(a.in);
  if (a.kind == "distance" || a.kind == "delta") {
    if (a.basis.empty()) throw UsageError("--basis is required for --kind " + a.kind);
    const BasisPointSet basis = read_basis(a.basis);
    EncodeOptions opts;
    opts.allow_unnormalized = a.allow_unnormalized;
    BpsEncoding enc;
    try {
      enc = encode_bps(cloud, basis, a.kind == "delta" ? EncodingKind::Delta : EncodingKind::Distance, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CloudNotNormalized) throw;
      throw Error(e.code(), e.detail() + " (pass --allow-unnormalized to encode as-is)");
    }
    write_bpk_file(a.out, enc, a.f32 ? BpkPrecision::F32 : BpkPrecision::Lossless);
  } else if (a.kind == "occupancy" || a.kind == "tdf") {
    if (a.m == 0) throw UsageError("--m is required for --kind " + a.kind);
    const VoxelGrid grid = a.kind == "occupancy"
                               ? encode_occupancy(cloud, a.m)
                               : encode_tdf(cloud, a.m, a.tau > 0.0 ? std::optional(a.tau) : std::nullopt, g.threads);
    write_bpk_file(a.out, grid, a.f32 ? BpkPrecision::F32 : BpkPrecision::Lossless);
  } else {
    throw UsageError("unknown --kind '" + a.kind + "'");
  }
}

struct DecodeArgs {
  std::string in;
  std::string basis;
  std::string out;
};

void run_decode(const DecodeArgs& a, const Globals&) {
  const BpkRecord rec = read_bpk_file(a.in);
  PointCloud out;
  if (const auto* enc = std::get_if<BpsEncoding>(&rec)) {
    if (enc->kind != EncodingKind::Delta)
      throw Error(ErrorCode::KindMismatch, a.in + ": only delta encodings can be decoded to points");
    if (a.basis.empty()) throw UsageError("--basis is required to decode a delta encoding");
    out = decode_delta(*enc, read_basis(a.basis));
  } else if (const auto* grid = std::get_if<VoxelGrid>(&rec)) {
    if (grid->kind != GridKind::Occupancy)
      throw Error(ErrorCode::KindMismatch, a.in + ": only occupancy grids can be decoded to points");
    out = decode_occupancy(*grid);
  } else {
    throw Error(ErrorCode::KindMismatch, a.in + ": a basis record is not an encoding");
  }
  write_text(a.out, [&](std::ostream& s) { write_xyz(s, out); });
}

struct ChamferArgs {
  std::string a;
  std::string b;
};

void run_chamfer(const ChamferArgs& a, const Globals&) {
  std::cout << format_double(chamfer(read_cloud(a.a), read_cloud(a.b))) << "\n";
}

struct SweepArgs {
  std::string dataset;
  std::size_t n_points = 10000;
  std::size_t instances = 20;
  std::size_t limit = 0;
  std::vector<std::size_t> budgets = kDefaultBudgets;
  std::vector<std::string> encoders;
  std::string out;
};

void run_sweep(const SweepArgs& a, const Globals& g) {
  SweepConfig config;
  config.budgets = a.budgets;
  config.seed = g.seed;
  config.workers = g.threads;
  if (!a.encoders.empty()) {
    config.encoders.clear();
    for (const auto& name : a.encoders) {
      const auto spec = parse_encoder(name);
      if (!spec) throw UsageError("unknown encoder '" + name + "'");
      config.encoders.push_back(*spec);
    }
  }

  std::vector<NamedCloud> dataset;
  if (a.dataset.empty()) {
    std::cerr << "building synthetic suite: 5 kinds x " << a.instances << " instances, n = " << a.n_points << "\n";
    for (auto& s : synthetic_suite(a.instances, a.n_points, g.seed, g.threads))
      dataset.push_back({std::move(s.id), std::move(s.cloud)});
  } else {
    dataset = load_cloud_dir(a.dataset, a.n_points, g.seed, a.limit);
    if (dataset.empty()) throw Error(ErrorCode::EmptyCloud, a.dataset + ": no .off or .xyz files");
    for (auto& d : dataset) d.cloud = normalize(d.cloud).first;
    std::cerr << "loaded " << dataset.size() << " shapes from " << a.dataset << "\n";
  }

  const ReconstructionReport report = run_reconstruction_sweep(dataset, config);
  std::size_t failed = 0;
  for (const auto& r : report.rows) failed += r.ok ? 0 : 1;
  if (failed > 0) std::cerr << failed << " of " << report.rows.size() << " cells failed\n";
  write_text(a.out, [&](std::ostream& s) { report.write_csv(s); });
}

struct BenchArgs {
  std::vector<std::size_t> n_values = {1000, 10000, 100000};
  std::vector<std::size_t> k_values = {512, 1024, 2048};
  std::string strategy = "uniform";
  std::size_t reps = 10;
  std::string out;
};

void run_bench(const BenchArgs& a, const Globals& g) {
  ThroughputConfig config;
  config.n_values = a.n_values;
  config.k_values = a.k_values;
  const auto strategy = parse_strategy(a.strategy);
  if (!strategy) throw UsageError("unknown --strategy '" + a.strategy + "'");
  config.strategy = *strategy;
  config.repetitions = a.reps;
  config.seed = g.seed;
  config.workers = g.threads;
  std::cerr << "kernels: " << kernels::to_string(kernels::active().level) << ", workers: " << g.threads << "\n";
  const ThroughputReport report = run_throughput(config);
  write_text(a.out, [&](std::ostream& s) { report.write_csv(s); });
}

struct ClassifyArgs {
  std::string train;
  std::string test;
  std::string basis;
  std::size_t n_points = 2048;
  std::string out;
};

struct LabeledSet {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<PointCloud> clouds;
};

// One subdirectory per label.
LabeledSet load_labeled(const std::string& dir, std::size_t n_points, std::uint64_t seed) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + dir);
  std::vector<fs::path> classes;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) classes.push_back(e.path());
  std::sort(classes.begin(), classes.end());

  LabeledSet out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::string label = classes[c].filename().string();
    for (auto& item : load_cloud_dir(classes[c], n_points, derive_seed(seed, c))) {
      out.ids.push_back(label + "/" + item.id);
      out.labels.push_back(label);
      out.clouds.push_back(normalize(item.cloud).first);
    }
  }
  if (out.clouds.empty()) throw Error(ErrorCode::EmptyTrainingSet, dir + ": no labeled shapes found");
  return out;
}

void run_classify(const ClassifyArgs& a, const Globals& g) {
  const BasisPointSet basis = read_basis(a.basis);
  const LabeledSet train = load_labeled(a.train, a.n_points, derive_seed(g.seed, 1));
  const LabeledSet test = load_labeled(a.test, a.n_points, derive_seed(g.seed, 2));

  const auto train_enc = encode_batch(train.clouds, basis, EncodingKind::Distance, g.threads);
  const auto test_enc = encode_batch(test.clouds, basis, EncodingKind::Distance, g.threads);
  std::vector<LabeledEncoding> labeled;
  for (std::size_t i = 0; i < train_enc.size(); ++i) labeled.push_back({train_enc[i], train.labels[i]});
  const auto predicted = knn_classify(labeled, test_enc, g.threads);

  std::size_t correct = 0;
  write_text(a.out, [&](std::ostream& s) {
    s << "id,label,predicted\n";
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      correct += predicted[i] == test.labels[i] ? 1 : 0;
      s << csv_field(test.ids[i]) << ',' << csv_field(test.labels[i]) << ',' << csv_field(predicted[i]) << '\n';
    }
  });
  std::cerr << "accuracy " << correct << "/" << predicted.size() << " = "
            << static_cast<double>(correct) / static_cast<double>(predicted.size()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Basis point set encoding of 3D point clouds"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  if (const char* env = std::getenv("BPS_SEED")) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: BPS_SEED must be an unsigned integer\n";
      return kUsageError;
    }
  }
  app.add_option("--seed", g.seed, "RNG seed (default: $BPS_SEED or 0)");
  app.add_option("--threads", g.threads, "worker cap (default: available parallelism)")->check(CLI::PositiveNumber);
  app.add_option("--simd", g.simd, "kernel level: scalar, avx2, neon (default: $BPS_SIMD or best)");

  GenBasisArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-basis", "generate a basis point set");
  gen_cmd->add_option("--strategy", gen.strategy, "rect, ball, uniform or hcp")->required();
  gen_cmd->add_option("--k", gen.k, "number of basis points");
  gen_cmd->add_option("--m", gen.m, "rect grid resolution per axis");
  gen_cmd->add_option("--radius", gen.radius, "ball radius")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen.out, "output .bpk")->required();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample-mesh", "sample points from an OFF mesh surface");
  sample_cmd->add_option("--in", sample.in, "input .off")->required();
  sample_cmd->add_option("--n", sample.n, "number of samples")->check(CLI::PositiveNumber);
  sample_cmd->add_flag("--normalize", sample.normalize, "fit the result into the unit ball");
  sample_cmd->add_option("--out", sample.out, "output .xyz (default stdout)");

  SampleArgs synth;
  synth.n = 10000;
  auto* synth_cmd = app.add_subcommand("synth", "sample a synthetic shape surface");
  synth_cmd->add_option("--kind", synth.kind, "sphere, torus, box, sheet or cylinder")->required();
  synth_cmd->add_option("--n", synth.n, "number of samples")->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--normalize", synth.normalize, "fit the result into the unit ball");
  synth_cmd->add_option("--out", synth.out, "output .xyz (default stdout)");

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "encode a point cloud");
  enc_cmd->add_option("--in", enc.in, "input .xyz ('-' for stdin)")->required();
  enc_cmd->add_option("--basis", enc.basis, "basis .bpk (distance, delta)");
  enc_cmd->add_option("--kind", enc.kind, "distance, delta, occupancy or tdf");
  enc_cmd->add_option("--m", enc.m, "grid resolution (occupancy, tdf)");
  enc_cmd->add_option("--tau", enc.tau, "TDF truncation (default 2*sqrt(3)/m)");
  enc_cmd->add_flag("--allow-unnormalized", enc.allow_unnormalized, "skip the unit-ball check");
  enc_cmd->add_flag("--f32", enc.f32, "store values as 32-bit floats even when lossy");
  enc_cmd->add_option("--out", enc.out, "output .bpk")->required();

  DecodeArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "decode a delta encoding or occupancy grid to points");
  dec_cmd->add_option("--in", dec.in, "input .bpk")->required();
  dec_cmd->add_option("--basis", dec.basis, "basis .bpk (delta)");
  dec_cmd->add_option("--out", dec.out, "output .xyz (default stdout)");

  ChamferArgs cham;
  auto* cham_cmd = app.add_subcommand("chamfer", "print the Chamfer distance between two clouds");
  cham_cmd->add_option("--a", cham.a, "first .xyz")->required();
  cham_cmd->add_option("--b", cham.b, "second .xyz")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "reconstruction quality vs encoding length");
  sweep_cmd->add_option("--dataset", sweep.dataset, "directory of .off/.xyz (default: synthetic suite)");
  sweep_cmd->add_option("--n-points", sweep.n_points, "points sampled per shape")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--instances", sweep.instances, "synthetic instances per kind")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--limit", sweep.limit, "random subset of dataset files");
  sweep_cmd->add_option("--budgets", sweep.budgets, "description lengths N")->delimiter(',');
  sweep_cmd->add_option("--encoders", sweep.encoders, "e.g. raw-subsample,occupancy,bps-delta:hcp")->delimiter(',');
  sweep_cmd->add_option("--out", sweep.out, "output CSV (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "index build and query throughput");
  bench_cmd->add_option("--n", bench.n_values, "cloud sizes")->delimiter(',');
  bench_cmd->add_option("--k", bench.k_values, "basis sizes")->delimiter(',');
  bench_cmd->add_option("--strategy", bench.strategy, "basis strategy");
  bench_cmd->add_option("--reps", bench.reps, "repetitions (>= 3)");
  bench_cmd->add_option("--out", bench.out, "output CSV (default stdout)");

  ClassifyArgs cls;
  auto* cls_cmd = app.add_subcommand("classify", "1-NN over distance features; one subdirectory per label");
  cls_cmd->add_option("--train", cls.train, "training directory")->required();
  cls_cmd->add_option("--test", cls.test, "test directory")->required();
  cls_cmd->add_option("--basis", cls.basis, "basis .bpk")->required();
  cls_cmd->add_option("--n-points", cls.n_points, "points sampled per mesh")->check(CLI::PositiveNumber);
  cls_cmd->add_option("--out", cls.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return kUsageError;
  }

  try {
    if (!g.simd.empty()) {
      const auto level = kernels::parse_level(g.simd);
      if (!level || !kernels::supported(*level)) throw UsageError("unsupported --simd '" + g.simd + "'");
      kernels::set_active(*level);
    }
    if (*gen_cmd) run_gen_basis(gen, g);
    else if (*sample_cmd) run_sample_mesh(sample, g);
    else if (*synth_cmd) run_synth(synth, g);
    else if (*enc_cmd) run_encode(enc, g);
    else if (*dec_cmd) run_decode(dec, g);
    else if (*cham_cmd) run_chamfer(cham, g);
    else if (*sweep_cmd) run_sweep(sweep, g);
    else if (*bench_cmd) run_bench(bench, g);
    else if (*cls_cmd) run_classify(cls, g);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
