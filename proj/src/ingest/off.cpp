#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "bps/ingest.hpp"

namespace bps {

double TriangleMesh::face_area(std::size_t f) const {
  const auto& [ia, ib, ic] = faces[f];
  const Vec3& a = vertices[ia];
  const Vec3& b = vertices[ib];
  const Vec3& c = vertices[ic];
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 cr{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return 0.5 * std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
}

double TriangleMesh::area() const {
  double total = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) total += face_area(f);
  return total;
}

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
};

// Splits text into non-empty, comment-stripped, tokenized lines.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(Line& line) {
    while (pos_ < text_.size()) {
      std::size_t eol = text_.find('\n', pos_);
      if (eol == std::string_view::npos) eol = text_.size();
      std::string_view raw = text_.substr(pos_, eol - pos_);
      pos_ = eol + 1;
      ++number_;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      line.tokens.clear();
      line.number = number_;
      std::size_t i = 0;
      while (i < raw.size()) {
        while (i < raw.size() && is_space(raw[i])) ++i;
        const std::size_t start = i;
        while (i < raw.size() && !is_space(raw[i])) ++i;
        if (i > start) line.tokens.push_back(raw.substr(start, i - start));
      }
      if (!line.tokens.empty()) return true;
    }
    return false;
  }

  std::size_t end_line() const { return number_ + 1; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

bool parse_count(std::string_view tok, std::size_t& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_real(std::string_view tok, double& out) {
  const auto* end = tok.data() + tok.size();
  // from_chars rejects a leading '+', which some exporters write.
  const char* begin = tok.data();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

TriangleMesh parse_off(std::string_view text) {
  LineReader reader(text);
  Line line;
  if (!reader.next(line)) throw Error(ErrorCode::MalformedHeader, "empty input; expected 'OFF' header", 1);

  std::vector<std::string_view> counts;
  std::size_t counts_line = line.number;
  const std::string_view head = line.tokens[0];
  if (head.substr(0, 3) != "OFF")
    throw Error(ErrorCode::MalformedHeader, "expected 'OFF' header, found '" + std::string(head) + "'", line.number);
  if (head.size() > 3) counts.push_back(head.substr(3));
  counts.insert(counts.end(), line.tokens.begin() + 1, line.tokens.end());
  if (counts.empty()) {
    if (!reader.next(line)) throw Error(ErrorCode::TruncatedFile, "missing vertex/face counts", reader.end_line());
    counts = line.tokens;
    counts_line = line.number;
  }

  std::size_t n_vertices = 0;
  std::size_t n_faces = 0;
  std::size_t n_edges = 0;
  if (counts.size() < 2 || counts.size() > 3 || !parse_count(counts[0], n_vertices) ||
      !parse_count(counts[1], n_faces) || (counts.size() == 3 && !parse_count(counts[2], n_edges)))
    throw Error(ErrorCode::MalformedHeader, "expected counts 'V F [E]'", counts_line);

  constexpr std::size_t kReserveCap = 1u << 20;
  TriangleMesh mesh;
  mesh.vertices.reserve(std::min(n_vertices, kReserveCap));
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (!reader.next(line))
      throw Error(ErrorCode::TruncatedFile,
                  "expected " + std::to_string(n_vertices) + " vertices, found " + std::to_string(v), reader.end_line());
    Vec3 p{};
    if (line.tokens.size() < 3 || !parse_real(line.tokens[0], p[0]) || !parse_real(line.tokens[1], p[1]) ||
        !parse_real(line.tokens[2], p[2]))
      throw Error(ErrorCode::MalformedLine, "expected three vertex coordinates", line.number);
    mesh.vertices.push_back(p);
  }

  mesh.faces.reserve(std::min(n_faces, kReserveCap));
  for (std::size_t f = 0; f < n_faces; ++f) {
    if (!reader.next(line))
      throw Error(ErrorCode::TruncatedFile, "expected " + std::to_string(n_faces) + " faces, found " + std::to_string(f),
                  reader.end_line());
    std::size_t arity = 0;
    if (!parse_count(line.tokens[0], arity) || arity < 3 || line.tokens.size() < arity + 1)
      throw Error(ErrorCode::MalformedLine, "expected 'n i_1 ... i_n' with n >= 3", line.number);
    std::vector<std::size_t> idx(arity);
    for (std::size_t i = 0; i < arity; ++i) {
      if (!parse_count(line.tokens[i + 1], idx[i]))
        throw Error(ErrorCode::MalformedLine, "bad vertex index '" + std::string(line.tokens[i + 1]) + "'", line.number);
      if (idx[i] >= n_vertices)
        throw Error(ErrorCode::IndexOutOfRange,
                    "vertex index " + std::to_string(idx[i]) + " >= vertex count " + std::to_string(n_vertices),
                    line.number);
    }
    for (std::size_t i = 1; i + 1 < arity; ++i) {
      const std::array<std::size_t, 3> tri{idx[0], idx[i], idx[i + 1]};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
      mesh.faces.push_back(tri);
    }
  }
  return mesh;
}

TriangleMesh parse_off(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_off(std::string_view(text));
}

TriangleMesh read_off_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return parse_off(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail(), e.line());
  }
}

}  // namespace bps
