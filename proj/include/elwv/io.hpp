#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace elwv {

// "ELWV" snapshot file, little-endian:
//   char[4] "ELWV", u32 version, u32 ndim, u32 ncomp,
//   per dim: f64 origin, f64 spacing, u64 count,
//   f64 time, f64 payload[ncomp][count_0]...[count_{ndim-1}] row-major.
inline constexpr std::uint32_t kElwvVersion = 1;

struct ElwvAxis {
  double origin = 0.0;
  double spacing = 1.0;
  std::uint64_t count = 0;
};

struct ElwvArray {
  std::vector<ElwvAxis> axes;
  std::uint32_t ncomp = 1;
  double time = 0.0;
  std::vector<double> data;

  std::size_t points() const;
  void validate() const;
};

std::vector<char> encode_elwv(const ElwvArray& a);
ElwvArray decode_elwv(std::span<const char> bytes);
void write_elwv(const std::filesystem::path& path, const ElwvArray& a);
ElwvArray read_elwv(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// CSV with a "# schema=<name> version=<n>" first line and a header row.
class CsvTable {
 public:
  CsvTable(std::string schema, int version, std::vector<std::string> columns);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
  std::size_t rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const { return text_; }

 private:
  std::vector<std::string> columns_;
  std::string text_;
  std::size_t rows_ = 0;
};

struct CsvData {
  std::string schema;
  int version = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvData parse_csv(std::string_view text);

std::string sha1_hex(std::string_view bytes);
std::string sha1_file(const std::filesystem::path& path);

// Writes text files and remembers every path with its hash for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  // rel is relative to root; parent directories are created.
  void text(const std::string& rel, std::string_view content);
  void binary(const std::string& rel, std::span<const char> content);

  struct Entry {
    std::string path;
    std::uint64_t bytes = 0;
    std::string sha1;
  };
  const std::vector<Entry>& entries() const { return entries_; }
  // Writes manifest.json listing every file written so far, plus meta.
  void manifest(const nlohmann::json& meta);

 private:
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

}  // namespace elwv
