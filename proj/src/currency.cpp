#include "reserves/currency.hpp"

#include <algorithm>

#include "reserves/errors.hpp"

namespace reserves {

CurrencySet::CurrencySet(std::vector<std::string> codes) : codes_(std::move(codes)) {
  if (codes_.empty()) throw ConfigError("currency set is empty");
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (codes_[i].empty()) throw ConfigError("empty currency code");
    for (std::size_t j = i + 1; j < codes_.size(); ++j)
      if (codes_[i] == codes_[j])
        throw ConfigError("duplicate currency code " + codes_[i]);
  }
  auto usd = std::find(codes_.begin(), codes_.end(), "USD");
  if (usd == codes_.end())
    throw ConfigError("currency set must contain USD");
  usd_ = std::size_t(usd - codes_.begin());
}

std::optional<std::size_t> CurrencySet::find(const std::string& code) const {
  auto it = std::find(codes_.begin(), codes_.end(), code);
  if (it == codes_.end()) return std::nullopt;
  return std::size_t(it - codes_.begin());
}

}  // namespace reserves
