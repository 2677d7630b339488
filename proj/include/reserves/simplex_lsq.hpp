#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reserves/panels.hpp"

namespace reserves {

/// One rolling-window least-squares problem over the probability simplex:
/// minimize ||y - G beta||^2 subject to beta >= 0, sum(beta) = 1.
struct WindowProblem {
  std::size_t rows = 0;
  std::size_t n_ccy = 0;
  std::vector<double> g;  // rows x n_ccy, g[t][i] = (1 + r_i) de_i + r_i
  std::vector<double> y;
};

struct WindowSolution {
  std::vector<double> beta;  // exactly on the simplex
  double sse = 0.0;
  double kkt_residual = 0.0;
  bool nonunique = false;
};

/// Active-set quadratic program on the simplex. Rank-deficient windows are
/// flagged non-unique and resolved to a minimum-norm representative.
WindowSolution solve_window(const WindowProblem& problem, double tol = 1e-8);

struct BaselineSeries {
  Quarter start;  // quarter of the first window's final observation
  std::size_t n_ccy = 0;
  std::vector<double> shares;          // quarters x n_ccy
  std::vector<std::uint8_t> nonunique;
  std::vector<double> sse;

  std::size_t size() const { return nonunique.size(); }
};

/// Solve every rolling window of `window_len` observation quarters; shares
/// are reported at each window's final quarter.
BaselineSeries rolling_optimize(const ObservationSeries& obs,
                                const ReturnPanel& returns,
                                std::span<const double> equity_share,
                                int window_len);

}  // namespace reserves
