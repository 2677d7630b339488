#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "reserves/rng.hpp"

namespace reserves {

/// A point on the probability simplex: nonnegative shares summing to one.
struct SimplexShares {
  std::vector<double> v;

  SimplexShares() = default;
  explicit SimplexShares(std::vector<double> values);  // validates

  std::size_t size() const { return v.size(); }
  double operator[](std::size_t i) const { return v[i]; }
  std::span<const double> span() const { return v; }

  static bool is_simplex(std::span<const double> x, double tol = 1e-10);
};

/// Dirichlet parameter vector with its implied moments.
struct DirichletParams {
  std::vector<double> a;

  double sum() const;
  double mean(std::size_t i) const;
  double stddev(std::size_t i) const;
  std::vector<double> means() const;

  void validate() const;  // all entries positive
};

enum class ObsDist { kLaplace, kNormal, kCauchy };

ObsDist parse_obs_dist(const std::string& name);  // throws ConfigError
std::string to_string(ObsDist d);

/// How the equity share x_t enters the observation equation.
struct EquitySource {
  enum class Mode { kEstimated, kFixed };
  Mode mode = Mode::kEstimated;
  double fixed_value = 0.0;
};

/// Static model parameters.
struct ModelParams {
  double usd_share_var = 0.015 * 0.015;  // variance of the quarterly USD-share innovation
  double share_floor = 0.01;             // minimum mean share in the transition
  double alpha_min = 1.0;                // clamp when the scale formula goes nonpositive
  ObsDist obs_dist = ObsDist::kLaplace;
  EquitySource equity;

  void validate(std::size_t n_ccy) const;  // throws ConfigError
};

struct AlphaScale {
  double alpha = 0.0;
  bool clamped = false;
};

/// Dirichlet concentration that pins the USD-share innovation variance:
/// (b - b^2 - var) / var, clamped to alpha_min when nonpositive.
AlphaScale alpha_scale(double beta_usd, double usd_share_var,
                       double alpha_min = 1.0);

/// One-step-ahead variance and covariance of the share transition.
struct TransitionMoments {
  std::vector<double> var;  // per currency
  std::vector<double> cov;  // n x n, diagonal = var
  bool clamped = false;
};

TransitionMoments transition_moments(std::span<const double> beta,
                                     std::size_t usd_index,
                                     double usd_share_var,
                                     double alpha_min = 1.0);

/// Draw next-quarter shares from Dirichlet(alpha * max(beta_i, floor)).
/// Returns true when the concentration had to be clamped.
bool transition_sample(std::span<const double> beta, std::size_t usd_index,
                       const ModelParams& params, rng::Stream& rs,
                       std::span<double> out);

/// Predicted non-purchase rate: the equity/bond blend of per-currency
/// returns and exchange-rate drift.
double predict_observation(std::span<const double> beta, double equity_share,
                           std::span<const double> r_eq,
                           std::span<const double> r_bd,
                           std::span<const double> de);

/// Log-density of the observation error at scale sigma.
double obs_loglik(double y, double mu, double sigma, ObsDist dist);

/// Dirichlet parameters matching a mean vector and a target USD-share
/// standard deviation.
DirichletParams dirichlet_from_mean_usd_std(const SimplexShares& mean,
                                            std::size_t usd_index,
                                            double usd_std);

/// Wrap a raw parameter row (e.g. a published prior table).
DirichletParams prior_from_table(std::span<const double> raw);

}  // namespace reserves
