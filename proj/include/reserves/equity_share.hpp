#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reserves/panels.hpp"

namespace reserves {

/// Predicted rate of change for one asset class:
/// sum_i beta_i (1 + r_i) de_i + sum_i beta_i r_i.
double predicted_component(std::span<const double> beta,
                           std::span<const double> r,
                           std::span<const double> de);

struct EquityShareSeries {
  Quarter start;
  std::vector<double> x;               // in [0, 1]
  std::vector<std::uint8_t> degenerate;

  std::size_t size() const { return x.size(); }
};

/// Rolling-window weighted regression of the observed non-purchase rate on
/// the equity-vs-bond prediction gap, solved in closed form per window and
/// clamped to [0, 1]. `cofer` supplies stand-in currency weights; the window
/// spans [t - half_window, t + half_window] truncated at the series edges.
EquityShareSeries estimate_equity_share(const ObservationSeries& obs,
                                        const SharesSeries& cofer,
                                        const ReturnPanel& returns,
                                        int half_window = 10);

}  // namespace reserves
