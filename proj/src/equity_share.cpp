#include "reserves/equity_share.hpp"

#include <algorithm>

#include "reserves/errors.hpp"

namespace reserves {

double predicted_component(std::span<const double> beta,
                           std::span<const double> r,
                           std::span<const double> de) {
  if (beta.size() != r.size() || beta.size() != de.size())
    throw DataError("predicted_component: length mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i)
    out += beta[i] * ((1.0 + r[i]) * de[i] + r[i]);
  return out;
}

EquityShareSeries estimate_equity_share(const ObservationSeries& obs,
                                        const SharesSeries& cofer,
                                        const ReturnPanel& returns,
                                        int half_window) {
  if (half_window < 1) throw ConfigError("equity half window must be >= 1");
  std::size_t T = obs.size();
  if (returns.size() != T || returns.start != obs.start)
    throw DataError("estimate_equity_share: returns misaligned with observations");
  // Stand-in weights are the start-of-quarter shares, so quarter t uses the
  // COFER row at t-1.
  if (cofer.start > obs.start.prev() ||
      Quarter::from_index(cofer.start.index() + int(cofer.size()) - 1) <
          Quarter::from_index(obs.start.index() + int(T) - 2))
    throw DataError("estimate_equity_share: COFER series does not cover range");

  std::vector<double> p_eq(T), p_bd(T);
  for (std::size_t t = 0; t < T; ++t) {
    Quarter prior_q = obs.quarter(t).prev();
    std::span<const double> w = cofer.at(prior_q);
    p_eq[t] = predicted_component(w, returns.eq_row(t), returns.fx_row(t));
    p_bd[t] = predicted_component(w, returns.bond_row(t), returns.fx_row(t));
  }

  EquityShareSeries out;
  out.start = obs.start;
  out.x.resize(T);
  out.degenerate.resize(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t lo = t >= std::size_t(half_window) ? t - half_window : 0;
    std::size_t hi = std::min(T - 1, t + std::size_t(half_window));
    double num = 0.0, den = 0.0;
    for (std::size_t s = lo; s <= hi; ++s) {
      double w = 1.0 / (obs.sigma[s] * obs.sigma[s]);
      double gap = p_eq[s] - p_bd[s];
      num += w * (obs.y[s] - p_bd[s]) * gap;
      den += w * gap * gap;
    }
    if (den == 0.0) {
      out.x[t] = 0.0;
      out.degenerate[t] = 1;
    } else {
      out.x[t] = std::clamp(num / den, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace reserves
