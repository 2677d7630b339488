#include "reserves/accounting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reserves/errors.hpp"

namespace reserves {

void ReservePanel::validate() const {
  if (stock.size() < 2) throw DataError("reserve panel needs at least 2 quarters");
  if (purchases.size() != stock.size())
    throw DataError("reserve panel stock/purchase length mismatch");
  for (std::size_t i = 0; i < stock.size(); ++i)
    if (!(stock[i] > 0.0))
      throw DataError("nonpositive reserve stock at " + quarter(i).str());
}

std::vector<double> growth_rate(std::span<const double> levels) {
  if (levels.size() < 2) throw DataError("growth_rate needs at least 2 levels");
  std::vector<double> out(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || !(levels[i + 1] > 0.0))
      throw DataError("growth_rate requires positive levels");
    out[i] = (levels[i + 1] - levels[i]) / levels[i];
  }
  return out;
}

std::vector<double> nonpurchase_rate(const ReservePanel& panel) {
  panel.validate();
  std::vector<double> out(panel.size() - 1);
  for (std::size_t t = 1; t < panel.size(); ++t) {
    double prev = panel.stock[t - 1];
    out[t - 1] = (panel.stock[t] - prev) / prev - panel.purchases[t] / prev;
  }
  return out;
}

double zero_coupon_quarterly_return(double y_start, double y_end,
                                    double maturity_years) {
  if (!(y_start > -1.0) || !(y_end > -1.0))
    throw DataError("bond yield must exceed -1");
  if (maturity_years < 0.25)
    throw DataError("bond maturity below one quarter");
  return std::pow(1.0 + y_start, maturity_years) /
             std::pow(1.0 + y_end, maturity_years - 0.25) -
         1.0;
}

double equity_quarterly_return(double index_start, double index_end) {
  if (!(index_start > 0.0) || !(index_end > 0.0))
    throw DataError("equity index levels must be positive");
  return index_end / index_start - 1.0;
}

std::vector<double> drifted_shares(std::span<const double> beta,
                                   std::span<const double> de) {
  if (beta.size() != de.size())
    throw DataError("drifted_shares: beta/de length mismatch");
  std::vector<double> out(beta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(1.0 + de[i] > 0.0))
      throw DataError("exchange-rate growth at or below -100%");
    out[i] = beta[i] * (1.0 + de[i]);
    total += out[i];
  }
  if (!(total > 0.0)) throw DataError("drifted_shares: degenerate shares");
  for (double& v : out) v /= total;
  return out;
}

double linear_quantile(std::span<const double> values, double p) {
  if (values.empty()) throw DataError("quantile of empty data");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 1) return sorted[0];
  double h = p * double(sorted.size() - 1);
  double lo = std::floor(h);
  std::size_t i = std::size_t(lo);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i]);
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) throw DataError("sample_std needs at least 2 values");
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / double(values.size() - 1));
}

std::vector<double> sdr_quarterly_vol(const DailySeries& sdr, Quarter first,
                                      Quarter last, int min_daily_obs) {
  if (first > last) throw DataError("sdr_quarterly_vol: empty quarter range");
  std::size_t n_quarters = std::size_t(last - first) + 1;
  std::vector<double> out(n_quarters);
  std::size_t pos = 0;
  for (std::size_t qi = 0; qi < n_quarters; ++qi) {
    Quarter q = Quarter::from_index(first.index() + int(qi));
    while (pos < sdr.size() && sdr.dates[pos].quarter() < q) ++pos;
    std::vector<double> changes;
    double prev = 0.0;
    bool have_prev = false;
    int count = 0;
    std::size_t j = pos;
    for (; j < sdr.size() && sdr.dates[j].quarter() == q; ++j) {
      double v = sdr.values[j];
      if (!(v > 0.0))
        throw DataError("nonpositive SDR rate on " + sdr.dates[j].str());
      ++count;
      if (have_prev) changes.push_back((v - prev) / prev);
      prev = v;
      have_prev = true;
    }
    if (count < min_daily_obs)
      throw DataError("quarter " + q.str() + " has only " +
                      std::to_string(count) + " daily SDR observations");
    out[qi] = sample_std(changes);
    pos = j;
  }
  return out;
}

std::vector<double> scale_obs_vol(std::span<const double> quarterly_vol,
                                  std::span<const double> y,
                                  std::optional<double> sigma_floor) {
  if (quarterly_vol.empty() || y.empty())
    throw DataError("scale_obs_vol: empty input");
  double mean_vol = std::accumulate(quarterly_vol.begin(), quarterly_vol.end(), 0.0) /
                    double(quarterly_vol.size());
  if (!(mean_vol > 0.0))
    throw DataError("scale_obs_vol: quarterly volatility is identically zero");

  std::vector<double> abs_y(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) abs_y[i] = std::abs(y[i]);
  double half_iqr =
      (linear_quantile(abs_y, 0.75) - linear_quantile(abs_y, 0.25)) / 2.0;

  std::vector<double> out(quarterly_vol.size());
  if (!(half_iqr > 0.0)) {
    if (!sigma_floor)
      throw DataError(
          "scale_obs_vol: |y| has zero interquartile range; set sigma_floor");
    std::fill(out.begin(), out.end(), *sigma_floor);
    return out;
  }

  double k = half_iqr / mean_vol;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = quarterly_vol[i] * k;
    if (sigma_floor) out[i] = std::max(out[i], *sigma_floor);
    if (!(out[i] > 0.0))
      throw DataError("scale_obs_vol: zero volatility in quarter index " +
                      std::to_string(i) + "; set sigma_floor");
  }
  return out;
}

ReturnPanel build_return_panel(
    const MarketPanel& market, const CurrencySet& currencies,
    double maturity_years,
    const std::map<std::string, double>& bond_return_fallback) {
  if (market.quarters < 2) throw DataError("market panel needs at least 2 quarters");
  if (market.n_ccy != currencies.size())
    throw DataError("market panel currency count mismatch");

  const std::vector<double>* curve = nullptr;
  if (auto it = market.yields.find(maturity_years); it != market.yields.end())
    curve = &it->second;

  std::size_t n = currencies.size();
  std::size_t T = market.quarters - 1;
  ReturnPanel out;
  out.start = market.start.next();
  out.n_ccy = n;
  out.bond.resize(T * n);
  out.eq.resize(T * n);
  out.fx.resize(T * n);

  for (std::size_t i = 0; i < n; ++i) {
    bool has_curve = false;
    if (curve) {
      has_curve = true;
      for (std::size_t t = 0; t < market.quarters; ++t)
        if (std::isnan((*curve)[t * n + i])) has_curve = false;
    }
    double fallback = 0.0;
    if (!has_curve) {
      auto fb = bond_return_fallback.find(currencies.code(i));
      if (fb == bond_return_fallback.end()) {
        char m[32];
        std::snprintf(m, sizeof m, "%g", maturity_years);
        throw DataError("no " + std::string(m) +
                        "y yield curve and no bond_return fallback for " +
                        currencies.code(i));
      }
      fallback = fb->second;
      if (!(1.0 + fallback > 0.0))
        throw ConfigError("bond_return." + currencies.code(i) +
                          " must exceed -1");
    }
    for (std::size_t t = 0; t < T; ++t) {
      double e0 = market.fx_at(t, i);
      double e1 = market.fx_at(t + 1, i);
      if (!(e0 > 0.0) || !(e1 > 0.0))
        throw DataError("nonpositive exchange rate for " + currencies.code(i));
      out.fx[t * n + i] = (e1 - e0) / e0;
      out.eq[t * n + i] =
          equity_quarterly_return(market.equity_at(t, i), market.equity_at(t + 1, i));
      out.bond[t * n + i] =
          has_curve ? zero_coupon_quarterly_return((*curve)[t * n + i],
                                                   (*curve)[(t + 1) * n + i],
                                                   maturity_years)
                    : fallback;
    }
  }
  return out;
}

ObservationSeries build_observations(const ReservePanel& reserves,
                                     const MarketPanel& market,
                                     std::optional<double> sigma_floor) {
  ObservationSeries out;
  out.start = reserves.start.next();
  out.y = nonpurchase_rate(reserves);
  Quarter last = Quarter::from_index(out.start.index() + int(out.y.size()) - 1);
  std::vector<double> vol = sdr_quarterly_vol(market.sdr, out.start, last);
  out.sigma = scale_obs_vol(vol, out.y, sigma_floor);
  return out;
}

}  // namespace reserves
