#include "elwv/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

static_assert(std::endian::native == std::endian::little, "ELWV files are written in host order");

std::size_t ElwvArray::points() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

void ElwvArray::validate() const {
  if (axes.empty()) fail(ErrorCode::InvalidArgument, "elwv: need at least one axis");
  if (ncomp < 1) fail(ErrorCode::InvalidArgument, "elwv: ncomp must be >= 1");
  for (const auto& a : axes)
    if (a.count == 0 || !std::isfinite(a.origin) || !(a.spacing > 0.0))
      fail(ErrorCode::InvalidArgument, "elwv: axis needs count > 0, finite origin, spacing > 0");
  if (data.size() != points() * ncomp)
    fail(ErrorCode::InvalidArgument, "elwv: payload size does not match axes * ncomp");
}

namespace {

template <class T>
void put(std::vector<char>& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T get(std::span<const char> in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) fail(ErrorCode::Io, "elwv: truncated file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::vector<char> encode_elwv(const ElwvArray& a) {
  a.validate();
  std::vector<char> out;
  out.reserve(32 + 24 * a.axes.size() + 8 * a.data.size());
  out.insert(out.end(), {'E', 'L', 'W', 'V'});
  put<std::uint32_t>(out, kElwvVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(a.axes.size()));
  put<std::uint32_t>(out, a.ncomp);
  for (const auto& ax : a.axes) {
    put<double>(out, ax.origin);
    put<double>(out, ax.spacing);
    put<std::uint64_t>(out, ax.count);
  }
  put<double>(out, a.time);
  const auto* p = reinterpret_cast<const char*>(a.data.data());
  out.insert(out.end(), p, p + a.data.size() * sizeof(double));
  return out;
}

ElwvArray decode_elwv(std::span<const char> in) {
  if (in.size() < 4 || std::memcmp(in.data(), "ELWV", 4) != 0) fail(ErrorCode::Io, "elwv: bad magic");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(in, pos);
  if (version != kElwvVersion) fail(ErrorCode::Io, "elwv: unsupported version " + std::to_string(version));
  const auto ndim = get<std::uint32_t>(in, pos);
  if (ndim == 0 || ndim > 8) fail(ErrorCode::Io, "elwv: bad ndim");
  ElwvArray a;
  a.ncomp = get<std::uint32_t>(in, pos);
  for (std::uint32_t d = 0; d < ndim; ++d) {
    ElwvAxis ax;
    ax.origin = get<double>(in, pos);
    ax.spacing = get<double>(in, pos);
    ax.count = get<std::uint64_t>(in, pos);
    a.axes.push_back(ax);
  }
  a.time = get<double>(in, pos);
  const std::size_t n = a.points() * a.ncomp;
  if (in.size() - pos != n * sizeof(double)) fail(ErrorCode::Io, "elwv: payload size mismatch");
  a.data.resize(n);
  std::memcpy(a.data.data(), in.data() + pos, n * sizeof(double));
  a.validate();
  return a;
}

void write_elwv(const std::filesystem::path& path, const ElwvArray& a) {
  const auto bytes = encode_elwv(a);
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::Io, "write failed: " + path.string());
}

ElwvArray read_elwv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_elwv(bytes);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::string schema, int version, std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) fail(ErrorCode::InvalidArgument, "csv: no columns");
  text_ = "# schema=" + schema + " version=" + std::to_string(version) + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) text_ += (i ? "," : "") + columns_[i];
  text_ += "\n";
}

void CsvTable::row(std::span<const double> values) {
  if (values.size() != columns_.size()) fail(ErrorCode::InvalidArgument, "csv: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
  ++rows_;
}

CsvData parse_csv(std::string_view text) {
  CsvData out;
  std::istringstream in{std::string(text)};
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cur;
    std::istringstream ls(s);
    while (std::getline(ls, cur, ',')) cells.push_back(cur);
    return cells;
  };
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("schema=", 0) == 0) out.schema = tok.substr(7);
        else if (tok.rfind("version=", 0) == 0) out.version = std::stoi(tok.substr(8));
      }
      continue;
    }
    if (!header) {
      out.columns = split(line);
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      if (cell == "nan") row.push_back(std::nan(""));
      else if (cell == "inf") row.push_back(HUGE_VAL);
      else if (cell == "-inf") row.push_back(-HUGE_VAL);
      else {
        double v = 0.0;
        auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) fail(ErrorCode::Io, "csv: bad number '" + cell + "'");
        row.push_back(v);
      }
    }
    if (row.size() != out.columns.size()) fail(ErrorCode::Io, "csv: row width mismatch");
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string sha1_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha1(), nullptr) != 1)
    fail(ErrorCode::Internal, "sha1 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha1_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return sha1_hex(bytes);
}

ArtifactWriter::ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {}

void ArtifactWriter::text(const std::string& rel, std::string_view content) {
  binary(rel, std::span<const char>(content.data(), content.size()));
}

void ArtifactWriter::binary(const std::string& rel, std::span<const char> content) {
  const auto path = root_ / rel;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) fail(ErrorCode::Io, "write failed: " + path.string());
  const std::string_view view(content.data(), content.size());
  for (auto& e : entries_)
    if (e.path == rel) {
      e.bytes = content.size();
      e.sha1 = sha1_hex(view);
      return;
    }
  entries_.push_back({rel, content.size(), sha1_hex(view)});
}

void ArtifactWriter::manifest(const nlohmann::json& meta) {
  nlohmann::json j = meta;
  j["files"] = nlohmann::json::array();
  for (const auto& e : entries_) j["files"].push_back({{"path", e.path}, {"bytes", e.bytes}, {"sha1", e.sha1}});
  const std::string text = j.dump(2) + "\n";
  const auto path = root_ / "manifest.json";
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  f << text;
}

}  // namespace elwv
