#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "bps/ingest.hpp"
#include "bps/random.hpp"

namespace bps {

// ---------------------------------------------------------------------------
// XYZ

PointCloud read_xyz(std::istream& in) {
  PointCloud cloud(3);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Vec3 p{};
    std::size_t fields = 0;
    std::size_t i = 0;
    const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; };
    while (i < line.size()) {
      while (i < line.size() && space(line[i])) ++i;
      if (i == line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && !space(line[i])) ++i;
      if (fields == 3) throw Error(ErrorCode::MalformedLine, "expected exactly three fields", number);
      const char* first = line.data() + start;
      const char* last = line.data() + i;
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, p[fields]);
      if (ec != std::errc() || ptr != last || !std::isfinite(p[fields]))
        throw Error(ErrorCode::MalformedLine, "bad number '" + std::string(line.substr(start, i - start)) + "'", number);
      ++fields;
    }
    if (fields == 0) continue;
    if (fields != 3) throw Error(ErrorCode::MalformedLine, "expected exactly three fields", number);
    cloud.push_back(p);
  }
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "no points in XYZ input");
  return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  if (cloud.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "XYZ files hold three-dimensional points");
  // Shortest decimal that parses back to the same double.
  char buf[96];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    char* p = buf;
    for (std::size_t a = 0; a < 3; ++a) {
      p = std::to_chars(p, buf + sizeof buf, cloud(i, a)).ptr;
      *p++ = a < 2 ? ' ' : '\n';
    }
    out.write(buf, p - buf);
  }
}

PointCloud read_xyz_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return read_xyz(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail(), e.line());
  }
}

void write_xyz_file(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_xyz(out, cloud);
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// BPK

namespace {

constexpr char kMagic[4] = {'B', 'P', 'S', 'K'};

class ByteWriter {
 public:
  void raw(const void* data, std::size_t n) { buf_.append(static_cast<const char*>(data), n); }
  void uint(std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
  }
  void u8(std::uint8_t v) { uint(v, 1); }
  void u16(std::uint16_t v) { uint(v, 2); }
  void u32(std::uint32_t v) { uint(v, 4); }
  void u64(std::uint64_t v) { uint(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::string finish() {
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(buf_.data()), static_cast<uInt>(buf_.size()));
    u32(static_cast<std::uint32_t>(crc));
    return std::move(buf_);
  }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t uint(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  /// Fails early, before allocating, when a declared payload cannot fit.
  void need(std::size_t n) const {
    if (n > bytes_.size() - pos_)
      throw Error(ErrorCode::TruncatedFile, "BPK stream ends at byte " + std::to_string(bytes_.size()) +
                                                "; needed " + std::to_string(pos_ + n));
  }
  void need_array(std::size_t a, std::size_t b, std::size_t elem) const {
    const std::size_t limit = bytes_.size();
    if (b != 0 && a > limit / b / elem + 1) need(limit + 1);
    need(a * b * elem);
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void write_header(ByteWriter& w, BpkKind kind) {
  w.raw(kMagic, 4);
  w.u16(kBpkVersion);
  w.u8(static_cast<std::uint8_t>(kind));
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw Error(ErrorCode::InvalidParams, std::string(what) + " exceeds the BPK 32-bit limit");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string to_bpk(const BasisPointSet& basis) {
  ByteWriter w;
  write_header(w, BpkKind::Basis);
  w.u8(static_cast<std::uint8_t>(basis.strategy()));
  w.u32(checked_u32(basis.dim(), "dimension"));
  w.u32(checked_u32(basis.size(), "basis size"));
  w.f64(basis.radius());
  w.u64(basis.seed());
  w.u64(basis.id());
  for (double c : basis.points().coords()) w.f64(c);
  return w.finish();
}

namespace {

bool fits_f32(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return static_cast<double>(static_cast<float>(v)) == v || std::isnan(v); });
}

std::uint8_t payload_width(std::span<const double> a, std::span<const double> b, BpkPrecision precision) {
  return precision == BpkPrecision::F32 || (fits_f32(a) && fits_f32(b)) ? 4 : 8;
}

void write_reals(ByteWriter& w, std::span<const double> values, std::uint8_t width) {
  for (double v : values) {
    if (width == 4)
      w.f32(static_cast<float>(v));
    else
      w.f64(v);
  }
}

std::uint8_t read_width(ByteReader& r) {
  const std::uint8_t width = r.u8();
  if (width != 4 && width != 8) throw Error(ErrorCode::MalformedHeader, "invalid payload width");
  return width;
}

void read_reals(ByteReader& r, std::vector<double>& values, std::uint8_t width) {
  for (auto& v : values) v = width == 4 ? static_cast<double>(r.f32()) : r.f64();
}

}  // namespace

std::string to_bpk(const BpsEncoding& enc, BpkPrecision precision) {
  if (!enc.nearest.empty() && enc.nearest.size() != enc.size())
    throw Error(ErrorCode::InvalidParams, "nearest-index payload length differs from the encoding length");
  ByteWriter w;
  write_header(w, enc.kind == EncodingKind::Distance ? BpkKind::DistanceEncoding : BpkKind::DeltaEncoding);
  const std::uint8_t width = payload_width(enc.values, enc.attributes, precision);
  w.u32(checked_u32(enc.dim, "dimension"));
  w.u32(checked_u32(enc.size(), "encoding length"));
  w.u64(enc.basis_id);
  w.u8(width);
  w.u64(enc.source_size);
  w.u8(enc.nearest.empty() ? 0 : 1);
  w.u32(checked_u32(enc.attribute_width, "attribute width"));
  write_reals(w, enc.values, width);
  for (std::size_t i : enc.nearest) w.u64(i);
  write_reals(w, enc.attributes, width);
  return w.finish();
}

std::string to_bpk(const VoxelGrid& grid, BpkPrecision precision) {
  ByteWriter w;
  write_header(w, BpkKind::VoxelGrid);
  const std::uint8_t width = payload_width(grid.cells, {}, precision);
  w.u8(static_cast<std::uint8_t>(grid.kind));
  w.u32(checked_u32(grid.resolution, "grid resolution"));
  w.f64(grid.truncation);
  w.u8(width);
  write_reals(w, grid.cells, width);
  return w.finish();
}

BpkRecord from_bpk(std::string_view bytes) {
  ByteReader r(bytes);
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "not a BPK stream");
  r.uint(4);
  const std::uint16_t version = r.u16();
  if (version != kBpkVersion)
    throw Error(ErrorCode::UnsupportedVersion, "BPK version " + std::to_string(version) + " is not supported");
  const std::uint8_t kind = r.u8();

  // Parse the body first so a short stream reports TruncatedFile, then verify the CRC.
  auto verify_crc = [&] {
    const std::size_t body_end = r.pos();
    const std::uint32_t stored = r.u32();
    const auto actual = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(body_end)));
    if (stored != actual) throw Error(ErrorCode::ChecksumMismatch, "BPK CRC32 mismatch");
    if (r.pos() != bytes.size()) throw Error(ErrorCode::MalformedHeader, "trailing bytes after BPK record");
  };

  switch (static_cast<BpkKind>(kind)) {
    case BpkKind::Basis: {
      const auto strategy = r.u8();
      const std::size_t dim = r.u32();
      const std::size_t k = r.u32();
      const double radius = r.f64();
      const std::uint64_t seed = r.u64();
      const std::uint64_t id = r.u64();
      if (dim == 0 || strategy > static_cast<std::uint8_t>(BasisStrategy::Hcp))
        throw Error(ErrorCode::MalformedHeader, "invalid basis header");
      r.need_array(k, dim, 8);
      std::vector<double> coords(k * dim);
      for (auto& c : coords) c = r.f64();
      verify_crc();
      BasisPointSet basis(PointCloud(std::move(coords), dim), radius, static_cast<BasisStrategy>(strategy), seed);
      if (basis.id() != id) throw Error(ErrorCode::ChecksumMismatch, "basis content does not match its stored id");
      return basis;
    }
    case BpkKind::DistanceEncoding:
    case BpkKind::DeltaEncoding: {
      BpsEncoding enc;
      enc.kind = static_cast<BpkKind>(kind) == BpkKind::DistanceEncoding ? EncodingKind::Distance : EncodingKind::Delta;
      enc.dim = r.u32();
      const std::size_t k = r.u32();
      enc.basis_id = r.u64();
      const std::uint8_t width = read_width(r);
      enc.source_size = r.u64();
      const std::uint8_t has_nearest = r.u8();
      enc.attribute_width = r.u32();
      if (enc.dim == 0 || has_nearest > 1) throw Error(ErrorCode::MalformedHeader, "invalid encoding header");
      const std::size_t per = enc.kind == EncodingKind::Distance ? 1 : enc.dim;
      r.need_array(k, per, width);
      enc.values.resize(k * per);
      read_reals(r, enc.values, width);
      if (has_nearest) {
        r.need_array(k, 1, 8);
        enc.nearest.resize(k);
        for (auto& i : enc.nearest) {
          i = r.u64();
          if (i >= enc.source_size) throw Error(ErrorCode::IndexOutOfRange, "nearest index beyond source size");
        }
      }
      r.need_array(k, enc.attribute_width, width);
      enc.attributes.resize(k * enc.attribute_width);
      read_reals(r, enc.attributes, width);
      verify_crc();
      return enc;
    }
    case BpkKind::VoxelGrid: {
      VoxelGrid grid;
      const auto gk = r.u8();
      if (gk > static_cast<std::uint8_t>(GridKind::Tdf)) throw Error(ErrorCode::MalformedHeader, "invalid grid kind");
      grid.kind = static_cast<GridKind>(gk);
      grid.resolution = r.u32();
      grid.truncation = r.f64();
      const std::uint8_t width = read_width(r);
      const std::size_t m = grid.resolution;
      if (m > (std::size_t{1} << 16)) throw Error(ErrorCode::MalformedHeader, "grid resolution too large");
      r.need_array(m * m, m, width);
      grid.cells.resize(m * m * m);
      read_reals(r, grid.cells, width);
      verify_crc();
      return grid;
    }
  }
  throw Error(ErrorCode::MalformedHeader, "unknown BPK record kind " + std::to_string(kind));
}

void write_bpk(std::ostream& out, const BpkRecord& record, BpkPrecision precision) {
  const std::string bytes = std::visit(
      [&](const auto& rec) {
        if constexpr (std::is_same_v<std::decay_t<decltype(rec)>, BasisPointSet>)
          return to_bpk(rec);
        else
          return to_bpk(rec, precision);
      },
      record);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

BpkRecord read_bpk(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_bpk(bytes);
}

void write_bpk_file(const std::filesystem::path& path, const BpkRecord& record, BpkPrecision precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_bpk(out, record, precision);
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

BpkRecord read_bpk_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return read_bpk(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail(), e.line());
  }
}

// ---------------------------------------------------------------------------
// Datasets

std::vector<NamedCloud> load_cloud_dir(const std::filesystem::path& dir, std::size_t n_points, std::uint64_t seed,
                                       std::size_t limit) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".off" || ext == ".OFF" || ext == ".xyz") files.push_back(std::filesystem::relative(entry.path(), dir));
  }
  std::sort(files.begin(), files.end());

  if (limit > 0 && limit < files.size()) {
    Rng rng(derive_seed(seed, files.size(), limit));
    for (std::size_t i = 0; i < limit; ++i) std::swap(files[i], files[i + rng.uniform_index(files.size() - i)]);
    files.resize(limit);
    std::sort(files.begin(), files.end());
  }

  std::vector<NamedCloud> out;
  out.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto path = dir / files[i];
    PointCloud cloud = path.extension() == ".xyz" ? read_xyz_file(path)
                                                  : sample_surface(read_off_file(path), n_points, derive_seed(seed, i));
    auto id = files[i];
    out.push_back({id.replace_extension().generic_string(), std::move(cloud)});
  }
  return out;
}

}  // namespace bps
