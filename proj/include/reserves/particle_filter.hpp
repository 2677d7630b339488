#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reserves/currency.hpp"
#include "reserves/equity_share.hpp"
#include "reserves/panels.hpp"
#include "reserves/rng.hpp"
#include "reserves/state_model.hpp"

namespace reserves {

/// Initial-state prior: either a raw Dirichlet parameter row or a
/// (mean vector, USD-share std) pair.
struct PriorSpec {
  enum class Mode { kTable, kMeanStd };
  Mode mode = Mode::kTable;
  std::vector<double> table;  // aligned with the currency set
  std::vector<double> mean;   // aligned with the currency set
  double usd_std = 0.0025;

  DirichletParams resolve(const CurrencySet& currencies) const;
};

enum class Engine { kSerial, kParallel };

/// Everything one filter run depends on. Fully determines the output
/// together with the input data; all randomness flows from `seed`.
struct RunConfig {
  CurrencySet currencies;
  Quarter start;  // prior quarter; observations begin at start.next()
  Quarter end;
  int n_particles = 10000;
  ModelParams model;
  PriorSpec prior;
  double maturity_years = 7.0;
  std::uint64_t seed = 1;
  std::vector<double> quantile_probs = {0.10, 0.25, 0.50, 0.75, 0.90};
  Engine engine = Engine::kParallel;
  int threads = 0;  // 0 = hardware default
  int equity_half_window = 10;
  int baseline_window = 0;  // 0 = currency count
  std::optional<double> sigma_floor;
  std::map<std::string, double> bond_return_fallback;

  void validate() const;  // throws ConfigError
};

/// Weighted particle approximation of one quarter's filtering posterior.
struct ParticleEnsemble {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> shares;   // n x dim
  std::vector<double> weights;  // sum to 1

  std::span<double> particle(std::size_t i) { return {shares.data() + i * dim, dim}; }
  std::span<const double> particle(std::size_t i) const { return {shares.data() + i * dim, dim}; }
};

/// Per-quarter posterior summaries plus goodness-of-fit series.
struct FilterSummary {
  Quarter start;  // first observation quarter
  std::size_t n_ccy = 0;
  std::vector<double> probs;
  std::vector<double> quantiles;  // quarters x n_ccy x probs
  std::vector<double> y_obs;
  std::vector<double> y_pred_median;
  std::vector<double> sigma;
  std::vector<double> ess;  // effective sample size before resampling
  std::uint64_t alpha_clamp_events = 0;

  std::size_t size() const { return y_obs.size(); }
  double quantile(std::size_t t, std::size_t ccy, std::size_t p) const {
    return quantiles[(t * n_ccy + ccy) * probs.size() + p];
  }
};

/// Aligned inputs for run_filter. `equity_share` has one entry per
/// observation quarter.
struct FilterData {
  ObservationSeries obs;
  ReturnPanel returns;
  std::vector<double> equity_share;
  DirichletParams prior;
};

ParticleEnsemble init_particles(const DirichletParams& prior, int n,
                                std::uint64_t seed, Engine engine = Engine::kSerial,
                                int threads = 0);

/// Multiply weights by the observation likelihood and renormalize.
/// Computed via log weights with max subtraction.
void reweight(ParticleEnsemble& ensemble, std::span<const double> mu, double y,
              double sigma, ObsDist dist);

/// n independent categorical draws over `weights`.
std::vector<std::uint32_t> multinomial_resample(std::span<const double> weights,
                                                std::size_t n, rng::Stream& rs);

/// Smallest value whose cumulative weight reaches p, sorting by value.
double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double p);

double effective_sample_size(std::span<const double> weights);

/// Run the full predict / reweight / resample loop over the observation
/// series. Deterministic given config.seed, regardless of engine or threads.
FilterSummary run_filter(const RunConfig& config, const FilterData& data);

/// Propagate the prior through the transition only (no data updates); used
/// as the no-information reference.
FilterSummary propagate_prior(const RunConfig& config, const FilterData& data);

/// Empirical coverage of central credible intervals against reported shares.
/// Requires the summary to carry quantiles at (1 +/- level)/2.
struct CalibrationCurve {
  std::vector<double> levels;
  std::size_t n_ccy = 0;
  std::vector<double> coverage;  // levels x n_ccy
  std::size_t n_reported = 0;

  double at(std::size_t level, std::size_t ccy) const {
    return coverage[level * n_ccy + ccy];
  }
};

CalibrationCurve calibration_curve(const FilterSummary& summary,
                                   const ReportedShares& reported,
                                   std::span<const double> levels);

}  // namespace reserves
