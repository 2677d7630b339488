#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace reserves {

/// Ordered set of currency identifiers. The US dollar must be present;
/// several model quantities are anchored to its position.
class CurrencySet {
 public:
  CurrencySet() = default;
  explicit CurrencySet(std::vector<std::string> codes);  // throws ConfigError

  std::size_t size() const { return codes_.size(); }
  const std::string& code(std::size_t i) const { return codes_[i]; }
  const std::vector<std::string>& codes() const { return codes_; }
  std::size_t usd_index() const { return usd_; }

  std::optional<std::size_t> find(const std::string& code) const;

  bool operator==(const CurrencySet&) const = default;

 private:
  std::vector<std::string> codes_;
  std::size_t usd_ = 0;
};

}  // namespace reserves
