#include "reserves/quarter.hpp"

#include <cctype>
#include <charconv>

#include "reserves/errors.hpp"

namespace reserves {

namespace {

int parse_int(std::string_view s, const char* what, const std::string& full) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("bad " + std::string(what) + " in \"" + full + "\"");
  return v;
}

}  // namespace

Quarter Quarter::parse(const std::string& key) {
  if (key.size() != 6 || (key[4] != 'Q' && key[4] != 'q'))
    throw DataError("bad quarter key \"" + key + "\" (expected YYYYQn)");
  Quarter out;
  out.year = parse_int(std::string_view(key).substr(0, 4), "year", key);
  out.q = parse_int(std::string_view(key).substr(5, 1), "quarter", key);
  if (out.q < 1 || out.q > 4)
    throw DataError("quarter out of range in \"" + key + "\"");
  return out;
}

std::string Quarter::str() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04dQ%d", year, q);
  return buf;
}

Date Date::parse(const std::string& iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
    throw DataError("bad date \"" + iso + "\" (expected YYYY-MM-DD)");
  Date d;
  d.year = parse_int(std::string_view(iso).substr(0, 4), "year", iso);
  d.month = parse_int(std::string_view(iso).substr(5, 2), "month", iso);
  d.day = parse_int(std::string_view(iso).substr(8, 2), "day", iso);
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    throw DataError("date out of range \"" + iso + "\"");
  return d;
}

std::string Date::str() const {
  char buf[12];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

}  // namespace reserves
