#pragma once

#include <compare>
#include <string>

namespace reserves {

/// A calendar quarter, keyed as "YYYYQn". Totally ordered, with integer
/// arithmetic on the quarter index so contiguity checks are cheap.
struct Quarter {
  int year = 0;
  int q = 1;  // 1..4

  static Quarter parse(const std::string& key);  // throws DataError
  std::string str() const;

  int index() const { return year * 4 + (q - 1); }
  static Quarter from_index(int idx) { return Quarter{idx / 4, idx % 4 + 1}; }

  Quarter next() const { return from_index(index() + 1); }
  Quarter prev() const { return from_index(index() - 1); }

  friend auto operator<=>(const Quarter& a, const Quarter& b) {
    return a.index() <=> b.index();
  }
  friend bool operator==(const Quarter& a, const Quarter& b) {
    return a.index() == b.index();
  }
  friend int operator-(const Quarter& a, const Quarter& b) {
    return a.index() - b.index();
  }
};

/// A calendar date, ISO "YYYY-MM-DD". Only used for daily series.
struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  static Date parse(const std::string& iso);  // throws DataError
  std::string str() const;
  Quarter quarter() const { return Quarter{year, (month - 1) / 3 + 1}; }

  friend auto operator<=>(const Date&, const Date&) = default;
};

}  // namespace reserves
