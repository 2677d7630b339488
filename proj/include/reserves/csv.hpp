#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace reserves::csv {

struct Table {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws DataError
};

/// Strict reader: header row required, comma separator, no quoting.
Table read(const std::filesystem::path& path);

/// Shortest round-trip decimal formatting (std::to_chars).
std::string format(double value);

double parse_double(const Table& t, std::size_t row, std::size_t col);
long parse_long(const Table& t, std::size_t row, std::size_t col);

class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  void field(const std::string& s);
  void field(double v) { field(format(v)); }
  void field(long v) { field(std::to_string(v)); }
  void field(int v) { field(std::to_string(v)); }
  void end_row();
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  bool row_open_ = false;
};

/// FNV-1a 64-bit digest of a file's bytes, hex encoded. Used to fingerprint
/// inputs in run metadata.
std::string file_digest(const std::filesystem::path& path);

}  // namespace reserves::csv
