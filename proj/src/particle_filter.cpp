#include "reserves/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reserves/errors.hpp"
#include "reserves/filter_kernels.hpp"

namespace reserves {

DirichletParams PriorSpec::resolve(const CurrencySet& currencies) const {
  if (mode == Mode::kTable) {
    if (table.size() != currencies.size())
      throw ConfigError("prior.params length does not match currency set");
    return prior_from_table(table);
  }
  if (mean.size() != currencies.size())
    throw ConfigError("prior.mean length does not match currency set");
  return dirichlet_from_mean_usd_std(SimplexShares(mean),
                                     currencies.usd_index(), usd_std);
}

void RunConfig::validate() const {
  if (currencies.size() == 0) throw ConfigError("no currencies configured");
  if (currencies.size() > kernels::kMaxCurrencies)
    throw ConfigError("too many currencies");
  if (n_particles < 2) throw ConfigError("n_particles must be at least 2");
  if (start >= end) throw ConfigError("start quarter must precede end quarter");
  model.validate(currencies.size());
  if (maturity_years < 0.25) throw ConfigError("maturity_years below one quarter");
  if (quantile_probs.empty()) throw ConfigError("no quantile probabilities");
  for (std::size_t i = 0; i < quantile_probs.size(); ++i) {
    double p = quantile_probs[i];
    if (!(p >= 0.0) || !(p <= 1.0))
      throw ConfigError("quantile probability out of [0, 1]");
    if (i > 0 && !(p > quantile_probs[i - 1]))
      throw ConfigError("quantile probabilities must be strictly increasing");
  }
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (equity_half_window < 1) throw ConfigError("equity half window must be >= 1");
  if (baseline_window < 0) throw ConfigError("baseline window must be nonnegative");
  if (sigma_floor && !(*sigma_floor > 0.0))
    throw ConfigError("sigma_floor must be positive");
  prior.resolve(currencies);  // surfaces dimension/feasibility errors
}

ParticleEnsemble init_particles(const DirichletParams& prior, int n,
                                std::uint64_t seed, Engine engine, int threads) {
  prior.validate();
  if (n < 2) throw ConfigError("particle count must be at least 2");
  ParticleEnsemble out;
  out.n = std::size_t(n);
  out.dim = prior.a.size();
  out.shares.resize(out.n * out.dim);
  out.weights.assign(out.n, 1.0 / double(n));
  if (engine == Engine::kSerial)
    kernels::init_particles_serial(prior.a, out.shares, seed, out.n, out.dim);
  else
    kernels::init_particles_parallel(prior.a, out.shares, seed, out.n, out.dim,
                                     threads);
  return out;
}

void reweight(ParticleEnsemble& ensemble, std::span<const double> mu, double y,
              double sigma, ObsDist dist) {
  if (mu.size() != ensemble.n) throw DataError("reweight: mu length mismatch");
  std::vector<double> lw(ensemble.n);
  for (std::size_t i = 0; i < ensemble.n; ++i)
    lw[i] = obs_loglik(y, mu[i], sigma, dist) +
            (ensemble.weights[i] > 0.0 ? std::log(ensemble.weights[i])
                                       : -std::numeric_limits<double>::infinity());
  double m = -std::numeric_limits<double>::infinity();
  for (double v : lw) m = std::max(m, v);
  if (!std::isfinite(m))
    throw NumericError("all particle weights vanished in reweight");
  double total = 0.0;
  for (std::size_t i = 0; i < ensemble.n; ++i) {
    ensemble.weights[i] = std::exp(lw[i] - m);
    total += ensemble.weights[i];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericError("particle weights underflowed to zero");
  for (double& w : ensemble.weights) w /= total;
}

std::vector<std::uint32_t> multinomial_resample(std::span<const double> weights,
                                                std::size_t n, rng::Stream& rs) {
  if (weights.empty()) throw DataError("resample: no weights");
  std::vector<double> cum(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw DataError("resample: negative weight");
    total += weights[i];
    cum[i] = total;
  }
  if (!(total > 0.0)) throw NumericError("resample: zero total weight");
  std::vector<std::uint32_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = rs.uniform() * total;
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    idx[k] = std::uint32_t(std::min<std::size_t>(
        std::size_t(it - cum.begin()), weights.size() - 1));
  }
  return idx;
}

double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double p) {
  if (values.empty() || values.size() != weights.size())
    throw DataError("weighted_quantile: bad inputs");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw DataError("weighted_quantile: probability out of [0, 1]");
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw DataError("weighted_quantile: negative weight");
    pairs.emplace_back(values[i], weights[i]);
    total += weights[i];
  }
  if (!(total > 0.0)) throw DataError("weighted_quantile: zero total weight");
  double out = 0.0;
  kernels::sorted_weighted_quantiles(pairs, {&p, 1}, {&out, 1});
  return out;
}

double effective_sample_size(std::span<const double> weights) {
  double ss = 0.0;
  for (double w : weights) ss += w * w;
  if (!(ss > 0.0)) throw NumericError("effective_sample_size: zero weights");
  return 1.0 / ss;
}

namespace {

struct FilterProbs {
  std::vector<double> all;      // config probs plus the median, ascending
  std::vector<std::size_t> map; // config prob index -> index in `all`
  std::size_t median = 0;
};

FilterProbs make_probs(const std::vector<double>& probs) {
  FilterProbs out;
  out.all = probs;
  auto pos = std::lower_bound(out.all.begin(), out.all.end(), 0.5);
  if (pos == out.all.end() || *pos != 0.5) pos = out.all.insert(pos, 0.5);
  out.median = std::size_t(pos - out.all.begin());
  out.map.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    auto it = std::lower_bound(out.all.begin(), out.all.end(), probs[i]);
    out.map[i] = std::size_t(it - out.all.begin());
  }
  return out;
}

void check_alignment(const RunConfig& config, const FilterData& data) {
  std::size_t T = data.obs.size();
  if (T == 0) throw DataError("run_filter: empty observation series");
  if (data.returns.size() != T || data.returns.start != data.obs.start)
    throw DataError("run_filter: return panel misaligned with observations");
  if (data.returns.n_ccy != config.currencies.size())
    throw DataError("run_filter: return panel currency count mismatch");
  if (data.equity_share.size() != T)
    throw DataError("run_filter: equity share series misaligned");
  for (std::size_t t = 0; t < T; ++t) {
    if (!std::isfinite(data.obs.y[t]) || !(data.obs.sigma[t] > 0.0))
      throw DataError("run_filter: bad observation at " +
                      data.obs.quarter(t).str());
    if (!(data.equity_share[t] >= 0.0) || !(data.equity_share[t] <= 1.0))
      throw DataError("run_filter: equity share out of [0, 1] at " +
                      data.obs.quarter(t).str());
  }
}

FilterSummary filter_loop(const RunConfig& config, const FilterData& data,
                          bool assimilate) {
  config.validate();
  check_alignment(config, data);
  DirichletParams prior = data.prior;
  prior.validate();
  if (prior.a.size() != config.currencies.size())
    throw ConfigError("prior dimension does not match currency set");

  const std::size_t T = data.obs.size();
  const std::size_t n = std::size_t(config.n_particles);
  const std::size_t dim = config.currencies.size();
  const bool parallel = config.engine == Engine::kParallel;
  const FilterProbs probs = make_probs(config.quantile_probs);
  const std::size_t np = probs.all.size();

  FilterSummary summary;
  summary.start = data.obs.start;
  summary.n_ccy = dim;
  summary.probs = config.quantile_probs;
  summary.quantiles.resize(T * dim * config.quantile_probs.size());
  summary.y_obs = data.obs.y;
  summary.y_pred_median.resize(T);
  summary.sigma = data.obs.sigma;
  summary.ess.resize(T);

  ParticleEnsemble ens = init_particles(prior, config.n_particles, config.seed,
                                        config.engine, config.threads);
  std::vector<double> next(n * dim);
  std::vector<double> log_weight(n);
  std::vector<double> mu(n);
  std::vector<double> qbuf(dim * np);
  std::vector<double> median_shares(dim);

  for (std::size_t t = 0; t < T; ++t) {
    kernels::StepInputs in;
    in.y = data.obs.y[t];
    in.sigma = data.obs.sigma[t];
    in.equity_share = data.equity_share[t];
    in.r_eq = data.returns.eq_row(t);
    in.r_bd = data.returns.bond_row(t);
    in.de = data.returns.fx_row(t);
    in.model = &config.model;
    in.usd_index = config.currencies.usd_index();
    in.seed = config.seed;
    in.t = std::uint32_t(t);

    if (parallel)
      kernels::propagate_and_weight_parallel(ens.shares, next, log_weight, mu,
                                             summary.alpha_clamp_events, in, n,
                                             dim, config.threads);
    else
      kernels::propagate_and_weight_serial(ens.shares, next, log_weight, mu,
                                           summary.alpha_clamp_events, in, n,
                                           dim);

    if (assimilate) {
      // Normalize via log weights; prior weights are uniform after resampling.
      double m = *std::max_element(log_weight.begin(), log_weight.end());
      if (!std::isfinite(m))
        throw NumericError("filter: weights degenerate at " +
                           data.obs.quarter(t).str());
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ens.weights[i] = std::exp(log_weight[i] - m);
        total += ens.weights[i];
      }
      if (!(total > 0.0) || !std::isfinite(total))
        throw NumericError("filter: weights underflowed at " +
                           data.obs.quarter(t).str());
      for (double& w : ens.weights) w /= total;
    }
    summary.ess[t] = effective_sample_size(ens.weights);

    if (parallel)
      kernels::column_quantiles_parallel(next, ens.weights, n, dim, probs.all,
                                         qbuf, config.threads);
    else
      kernels::column_quantiles_serial(next, ens.weights, n, dim, probs.all,
                                       qbuf);

    for (std::size_t c = 0; c < dim; ++c) {
      median_shares[c] = qbuf[c * np + probs.median];
      for (std::size_t p = 0; p < config.quantile_probs.size(); ++p)
        summary.quantiles[(t * dim + c) * config.quantile_probs.size() + p] =
            qbuf[c * np + probs.map[p]];
    }
    summary.y_pred_median[t] = predict_observation(
        median_shares, data.equity_share[t], data.returns.eq_row(t),
        data.returns.bond_row(t), data.returns.fx_row(t));

    if (assimilate) {
      rng::Stream rs(config.seed, 0, std::uint32_t(t), rng::StreamTag::kResample);
      std::vector<std::uint32_t> idx = multinomial_resample(ens.weights, n, rs);
      for (std::size_t k = 0; k < n; ++k)
        std::copy_n(next.data() + std::size_t(idx[k]) * dim, dim,
                    ens.shares.data() + k * dim);
      std::fill(ens.weights.begin(), ens.weights.end(), 1.0 / double(n));
    } else {
      ens.shares.swap(next);
    }
  }
  return summary;
}

}  // namespace

FilterSummary run_filter(const RunConfig& config, const FilterData& data) {
  return filter_loop(config, data, true);
}

FilterSummary propagate_prior(const RunConfig& config, const FilterData& data) {
  return filter_loop(config, data, false);
}

CalibrationCurve calibration_curve(const FilterSummary& summary,
                                   const ReportedShares& reported,
                                   std::span<const double> levels) {
  if (reported.empty()) throw DataError("calibration: no reported shares");
  CalibrationCurve out;
  out.levels.assign(levels.begin(), levels.end());
  out.n_ccy = summary.n_ccy;
  out.coverage.assign(levels.size() * summary.n_ccy, 0.0);

  auto prob_index = [&](double p) {
    for (std::size_t i = 0; i < summary.probs.size(); ++i)
      if (std::abs(summary.probs[i] - p) < 1e-9) return i;
    throw ConfigError("calibration: summary lacks quantile at required level");
  };

  Quarter last = Quarter::from_index(summary.start.index() +
                                     int(summary.size()) - 1);
  std::size_t used = 0;
  for (const auto& [q, shares] : reported) {
    if (q < summary.start || q > last) continue;
    if (shares.size() != summary.n_ccy)
      throw DataError("calibration: reported shares at " + q.str() +
                      " have wrong currency count");
    ++used;
  }
  if (used == 0)
    throw DataError("calibration: no reported quarters overlap the summary");
  out.n_reported = used;

  for (std::size_t li = 0; li < levels.size(); ++li) {
    double level = levels[li];
    if (!(level > 0.0) || !(level < 1.0))
      throw ConfigError("calibration level out of (0, 1)");
    std::size_t lo = prob_index((1.0 - level) / 2.0);
    std::size_t hi = prob_index((1.0 + level) / 2.0);
    for (std::size_t c = 0; c < summary.n_ccy; ++c) {
      std::size_t hits = 0;
      for (const auto& [q, shares] : reported) {
        if (q < summary.start || q > last) continue;
        std::size_t t = std::size_t(q - summary.start);
        double v = shares[c];
        if (v >= summary.quantile(t, c, lo) && v <= summary.quantile(t, c, hi))
          ++hits;
      }
      out.coverage[li * summary.n_ccy + c] = double(hits) / double(used);
    }
  }
  return out;
}

}  // namespace reserves
