#include "reserves/csv.hpp"

#include <charconv>
#include <cstdint>

#include "reserves/errors.hpp"

namespace reserves::csv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(pos)));
      return out;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
}

std::string where(const Table& t, std::size_t row, std::size_t col) {
  return t.path.string() + ":" + std::to_string(row + 2) + " field \"" +
         (col < t.header.size() ? t.header[col] : std::to_string(col)) + "\"";
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError(path.string() + ": missing column \"" + name + "\"");
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Table t;
  t.path = path;
  std::string line;
  if (!std::getline(in, line))
    throw DataError(path.string() + ": empty file (header row required)");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size())
      throw DataError(path.string() + ":" + std::to_string(t.rows.size() + 2) +
                      ": expected " + std::to_string(t.header.size()) +
                      " fields, got " + std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string format(double value) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw NumericError("number formatting failed");
  return std::string(buf, p);
}

double parse_double(const Table& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("bad number \"" + s + "\" at " + where(t, row, col));
  return v;
}

long parse_long(const Table& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("bad integer \"" + s + "\" at " + where(t, row, col));
  return v;
}

Writer::Writer(const std::filesystem::path& path,
               const std::vector<std::string>& header)
    : out_(path), path_(path) {
  if (!out_) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void Writer::field(const std::string& s) {
  if (row_open_) out_ << ',';
  out_ << s;
  row_open_ = true;
}

void Writer::end_row() {
  out_ << '\n';
  row_open_ = false;
}

void Writer::close() {
  out_.close();
  if (!out_) throw DataError("write failed for " + path_.string());
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string() + " for digest");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace reserves::csv
