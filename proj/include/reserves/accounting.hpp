#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reserves/currency.hpp"
#include "reserves/panels.hpp"

namespace reserves {

/// Period-over-period growth rates of a positive level series.
/// Output length is input length - 1.
std::vector<double> growth_rate(std::span<const double> levels);

/// Non-purchase rate of change: y_t = (W_t - W_{t-1})/W_{t-1} - C_t/W_{t-1}.
/// First output corresponds to the panel's second quarter.
std::vector<double> nonpurchase_rate(const ReservePanel& panel);

/// Quarterly holding return of a constant-maturity zero-coupon bond bought at
/// yield y_start and sold one quarter later at yield y_end (annual
/// compounding, quarter = 0.25 years).
double zero_coupon_quarterly_return(double y_start, double y_end,
                                    double maturity_years);

/// Total return of an index over one quarter.
double equity_quarterly_return(double index_start, double index_end);

/// Value shares after exchange-rate moves `de`, without rebalancing:
/// beta_i (1 + de_i) renormalized to the simplex.
std::vector<double> drifted_shares(std::span<const double> beta,
                                   std::span<const double> de);

/// Per-quarter sample standard deviation of daily proportional SDR/USD
/// changes. Each quarter needs at least `min_daily_obs` in-quarter
/// observations; changes never span a quarter boundary.
std::vector<double> sdr_quarterly_vol(const DailySeries& sdr, Quarter first,
                                      Quarter last, int min_daily_obs = 10);

/// Rescale the quarterly volatility series so its mean equals half the
/// interquartile range of |y|. Degenerate y (zero IQR) or a zero-volatility
/// quarter is an error unless a manual sigma floor is supplied.
std::vector<double> scale_obs_vol(std::span<const double> quarterly_vol,
                                  std::span<const double> y,
                                  std::optional<double> sigma_floor = {});

/// Linear-interpolation quantile of unsorted data (R type 7).
double linear_quantile(std::span<const double> values, double p);

/// Sample standard deviation, n-1 denominator.
double sample_std(std::span<const double> values);

/// Build the per-quarter return panel from raw market data. Row t covers
/// (quarter t-1, t]; the first row corresponds to market.start.next().
/// Currencies without a yield curve at `maturity_years` fall back to a
/// constant quarterly return from `bond_return_fallback`, keyed by code.
ReturnPanel build_return_panel(
    const MarketPanel& market, const CurrencySet& currencies,
    double maturity_years,
    const std::map<std::string, double>& bond_return_fallback = {});

/// Assemble y_t and sigma_obs,t for the panel's observation quarters.
ObservationSeries build_observations(const ReservePanel& reserves,
                                     const MarketPanel& market,
                                     std::optional<double> sigma_floor = {});

}  // namespace reserves
