#include "reserves/state_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "reserves/errors.hpp"
#include "reserves/filter_kernels.hpp"

namespace reserves {

SimplexShares::SimplexShares(std::vector<double> values) : v(std::move(values)) {
  if (!is_simplex(v))
    throw DataError("shares are not on the probability simplex");
}

bool SimplexShares::is_simplex(std::span<const double> x, double tol) {
  if (x.empty()) return false;
  double total = 0.0;
  for (double s : x) {
    if (!(s >= 0.0) || !std::isfinite(s)) return false;
    total += s;
  }
  return std::abs(total - 1.0) <= tol;
}

double DirichletParams::sum() const {
  return std::accumulate(a.begin(), a.end(), 0.0);
}

double DirichletParams::mean(std::size_t i) const { return a[i] / sum(); }

double DirichletParams::stddev(std::size_t i) const {
  double s = sum();
  double m = a[i] / s;
  return std::sqrt(m * (1.0 - m) / (s + 1.0));
}

std::vector<double> DirichletParams::means() const {
  double s = sum();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / s;
  return out;
}

void DirichletParams::validate() const {
  if (a.empty()) throw ConfigError("empty Dirichlet parameter vector");
  for (double ai : a)
    if (!(ai > 0.0)) throw ConfigError("Dirichlet parameters must be positive");
}

ObsDist parse_obs_dist(const std::string& name) {
  if (name == "laplace") return ObsDist::kLaplace;
  if (name == "normal") return ObsDist::kNormal;
  if (name == "cauchy") return ObsDist::kCauchy;
  throw ConfigError("unknown distribution \"" + name +
                    "\" (expected laplace, normal, or cauchy)");
}

std::string to_string(ObsDist d) {
  switch (d) {
    case ObsDist::kLaplace: return "laplace";
    case ObsDist::kNormal: return "normal";
    case ObsDist::kCauchy: return "cauchy";
  }
  return "?";
}

void ModelParams::validate(std::size_t n_ccy) const {
  if (!(usd_share_var > 0.0) || !(usd_share_var < 0.25))
    throw ConfigError("gamma out of range (0, 0.25)");
  if (n_ccy == 0) throw ConfigError("empty currency set");
  if (!(share_floor >= 0.0) || !(share_floor < 1.0 / double(n_ccy)))
    throw ConfigError("floor out of range [0, 1/N)");
  if (!(alpha_min > 0.0)) throw ConfigError("alpha_min must be positive");
  if (equity.mode == EquitySource::Mode::kFixed &&
      (equity.fixed_value < 0.0 || equity.fixed_value > 1.0))
    throw ConfigError("equity_share.value out of [0, 1]");
}

AlphaScale alpha_scale(double beta_usd, double usd_share_var, double alpha_min) {
  if (!(beta_usd >= 0.0) || !(beta_usd <= 1.0))
    throw NumericError("alpha_scale: USD share outside [0, 1]");
  // beta (1 - beta) <= var makes the formula nonpositive; clamp and flag.
  double alpha = (beta_usd - beta_usd * beta_usd - usd_share_var) / usd_share_var;
  if (alpha > 0.0) return {alpha, false};
  return {alpha_min, true};
}

TransitionMoments transition_moments(std::span<const double> beta,
                                     std::size_t usd_index,
                                     double usd_share_var, double alpha_min) {
  TransitionMoments out;
  AlphaScale as = alpha_scale(beta[usd_index], usd_share_var, alpha_min);
  out.clamped = as.clamped;
  double denom = as.alpha + 1.0;
  std::size_t n = beta.size();
  out.var.resize(n);
  out.cov.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    out.var[i] = beta[i] * (1.0 - beta[i]) / denom;
  for (std::size_t i = 0; i < n; ++i) {
    out.cov[i * n + i] = out.var[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      double c = -beta[i] * beta[j] / denom;
      out.cov[i * n + j] = c;
      out.cov[j * n + i] = c;
    }
  }
  return out;
}

bool transition_sample(std::span<const double> beta, std::size_t usd_index,
                       const ModelParams& params, rng::Stream& rs,
                       std::span<double> out) {
  std::size_t n = beta.size();
  if (n > kernels::kMaxCurrencies)
    throw ConfigError("currency count exceeds kernel limit");
  double shape[kernels::kMaxCurrencies];
  AlphaScale as = alpha_scale(std::max(beta[usd_index], params.share_floor),
                              params.usd_share_var, params.alpha_min);
  for (std::size_t i = 0; i < n; ++i)
    shape[i] = as.alpha * std::max(beta[i], params.share_floor);
  rng::dirichlet(rs, {shape, n}, out);
  return as.clamped;
}

double predict_observation(std::span<const double> beta, double equity_share,
                           std::span<const double> r_eq,
                           std::span<const double> r_bd,
                           std::span<const double> de) {
  double eq = 0.0, bd = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    eq += beta[i] * ((1.0 + r_eq[i]) * de[i] + r_eq[i]);
    bd += beta[i] * ((1.0 + r_bd[i]) * de[i] + r_bd[i]);
  }
  return equity_share * eq + (1.0 - equity_share) * bd;
}

double obs_loglik(double y, double mu, double sigma, ObsDist dist) {
  if (!(sigma > 0.0)) throw NumericError("observation scale must be positive");
  double z = (y - mu) / sigma;
  switch (dist) {
    case ObsDist::kLaplace:
      return -std::log(2.0 * sigma) - std::abs(z);
    case ObsDist::kNormal:
      return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sigma) -
             0.5 * z * z;
    case ObsDist::kCauchy:
      return -std::log(std::numbers::pi * sigma) - std::log1p(z * z);
  }
  throw NumericError("unreachable observation distribution");
}

DirichletParams dirichlet_from_mean_usd_std(const SimplexShares& mean,
                                            std::size_t usd_index,
                                            double usd_std) {
  double m = mean[usd_index];
  if (!(m > 0.0) || !(m < 1.0))
    throw ConfigError("prior mean USD share must be strictly interior");
  double var = usd_std * usd_std;
  if (!(var > 0.0) || !(var < m * (1.0 - m)))
    throw ConfigError("prior usd_std infeasible for the given mean");
  double concentration = m * (1.0 - m) / var - 1.0;
  DirichletParams out;
  out.a.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    out.a[i] = concentration * mean[i];
    if (!(out.a[i] > 0.0))
      throw ConfigError("prior mean has a nonpositive component");
  }
  return out;
}

DirichletParams prior_from_table(std::span<const double> raw) {
  DirichletParams out;
  out.a.assign(raw.begin(), raw.end());
  out.validate();
  return out;
}

}  // namespace reserves
