#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "reserves/quarter.hpp"

namespace reserves {

/// Quarterly reserve stock (USD level) and net-purchase flow (USD) for one
/// country. Quarters are contiguous starting at `start`.
struct ReservePanel {
  Quarter start;
  std::vector<double> stock;      // W_t, per quarter
  std::vector<double> purchases;  // C_t, net purchases during quarter t

  std::size_t size() const { return stock.size(); }
  Quarter quarter(std::size_t i) const { return Quarter::from_index(start.index() + int(i)); }

  void validate() const;  // throws DataError
};

/// One daily series (date, value), strictly increasing in date.
struct DailySeries {
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return dates.size(); }
};

/// Raw per-quarter market data aligned on a common quarter grid and currency
/// order. Yields are stored per maturity; a missing (quarter, currency) cell
/// is NaN.
struct MarketPanel {
  Quarter start;
  std::size_t quarters = 0;
  std::size_t n_ccy = 0;

  std::vector<double> fx;                            // quarters x n_ccy, USD per unit
  std::map<double, std::vector<double>> yields;      // maturity -> quarters x n_ccy
  std::vector<double> equity_index;                  // quarters x n_ccy
  DailySeries sdr;                                   // daily SDR/USD

  double fx_at(std::size_t t, std::size_t i) const { return fx[t * n_ccy + i]; }
  double equity_at(std::size_t t, std::size_t i) const { return equity_index[t * n_ccy + i]; }
};

/// Per-quarter, per-currency returns feeding the observation equation. Row t
/// holds quantities realized over (quarter t-1, quarter t]: the local-currency
/// bond and equity returns and the exchange-rate growth.
struct ReturnPanel {
  Quarter start;  // quarter at which each return period ends
  std::size_t n_ccy = 0;
  std::vector<double> bond;  // quarters x n_ccy
  std::vector<double> eq;    // quarters x n_ccy
  std::vector<double> fx;    // quarters x n_ccy, growth rate of USD per unit

  std::size_t size() const { return n_ccy == 0 ? 0 : bond.size() / n_ccy; }
  std::span<const double> bond_row(std::size_t t) const { return {bond.data() + t * n_ccy, n_ccy}; }
  std::span<const double> eq_row(std::size_t t) const { return {eq.data() + t * n_ccy, n_ccy}; }
  std::span<const double> fx_row(std::size_t t) const { return {fx.data() + t * n_ccy, n_ccy}; }
};

/// The model observable: non-purchase rate of change y_t and its scale.
struct ObservationSeries {
  Quarter start;
  std::vector<double> y;
  std::vector<double> sigma;

  std::size_t size() const { return y.size(); }
  Quarter quarter(std::size_t i) const { return Quarter::from_index(start.index() + int(i)); }
};

/// Dense per-quarter share vectors over the model currencies (COFER weights,
/// synthetic truth paths).
struct SharesSeries {
  Quarter start;
  std::size_t n_ccy = 0;
  std::vector<double> values;  // quarters x n_ccy

  std::size_t size() const { return n_ccy == 0 ? 0 : values.size() / n_ccy; }
  std::span<const double> row(std::size_t t) const { return {values.data() + t * n_ccy, n_ccy}; }
  std::span<const double> at(Quarter q) const { return row(std::size_t(q - start)); }
};

/// Sparse self-reported shares over the model currencies.
using ReportedShares = std::map<Quarter, std::vector<double>>;

}  // namespace reserves
