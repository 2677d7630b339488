#include "reserves/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "reserves/accounting.hpp"
#include "reserves/csv.hpp"
#include "reserves/errors.hpp"
#include "reserves/io_config.hpp"

namespace reserves {

namespace {

constexpr double kInitialStock = 1000.0;
const double kSynthMaturities[] = {2.0, 5.0, 7.0, 10.0};

struct FullSynth {
  MarketPanel market;
  SynthPanel panel;
  SharesSeries cofer;
  ReportedShares reported;
};

// Quarterly market levels: random-walk FX against the dollar, mean-reverting
// flat yield curves, lognormal equity indices, and a daily SDR series whose
// volatility follows a smooth seasonal profile.
MarketPanel gen_market(const RunConfig& config, const SynthSpec& spec,
                       rng::Stream& rs) {
  const std::size_t n = config.currencies.size();
  const std::size_t quarters = std::size_t(spec.quarters) + 1;
  const std::size_t usd = config.currencies.usd_index();

  MarketPanel m;
  m.start = config.start;
  m.quarters = quarters;
  m.n_ccy = n;
  m.fx.assign(quarters * n, 1.0);
  m.equity_index.assign(quarters * n, 100.0);
  for (double mat : kSynthMaturities) m.yields[mat].assign(quarters * n, 0.0);

  // Initial curve dispersion scales with the innovation vol so that
  // yield_vol == 0 produces genuinely constant, maturity-invariant returns.
  std::vector<double> yield(n, spec.yield_level);
  for (std::size_t i = 0; i < n; ++i)
    yield[i] = std::max(0.0005, spec.yield_level + 5.0 * spec.yield_vol * rs.normal());

  for (std::size_t t = 0; t < quarters; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (t > 0) {
        double prev_fx = m.fx[(t - 1) * n + i];
        m.fx[t * n + i] =
            i == usd ? 1.0 : prev_fx * std::exp(spec.fx_vol * rs.normal());
        double prev_eq = m.equity_index[(t - 1) * n + i];
        m.equity_index[t * n + i] =
            prev_eq * std::exp(spec.equity_drift -
                               0.5 * spec.equity_vol * spec.equity_vol +
                               spec.equity_vol * rs.normal());
        yield[i] = std::max(
            0.0005, yield[i] + 0.2 * (spec.yield_level - yield[i]) +
                        spec.yield_vol * rs.normal());
      }
      for (double mat : kSynthMaturities) m.yields[mat][t * n + i] = yield[i];
    }
  }

  // ~63 trading days per quarter, three months of 21 days.
  double sdr = 1.0;
  for (std::size_t t = 0; t < quarters; ++t) {
    Quarter q = Quarter::from_index(m.start.index() + int(t));
    double daily_vol = 0.003 * (1.0 + 0.4 * std::sin(double(t) * 0.7));
    for (int month = 0; month < 3; ++month) {
      for (int day = 1; day <= 21; ++day) {
        m.sdr.dates.push_back(Date{q.year, 3 * (q.q - 1) + month + 1, day});
        m.sdr.values.push_back(sdr);
        sdr *= std::exp(daily_vol * rs.normal());
      }
    }
  }
  return m;
}

double draw_noise(rng::Stream& rs, ObsDist dist, double scale) {
  switch (dist) {
    case ObsDist::kLaplace: return rs.laplace(scale);
    case ObsDist::kNormal: return scale * rs.normal();
    case ObsDist::kCauchy: return rs.cauchy(scale);
  }
  throw NumericError("unreachable noise distribution");
}

FullSynth generate(const RunConfig& config, const SynthSpec& spec) {
  if (spec.quarters < 2) throw ConfigError("synth.quarters must be at least 2");
  const std::size_t n = config.currencies.size();
  const std::size_t T = std::size_t(spec.quarters);
  const std::size_t usd = config.currencies.usd_index();

  FullSynth out;
  rng::Stream market_rs(config.seed, 0, 0, rng::StreamTag::kSynthMarket);
  out.market = gen_market(config, spec, market_rs);

  SynthPanel& p = out.panel;
  p.returns = build_return_panel(out.market, config.currencies,
                                 config.maturity_years,
                                 config.bond_return_fallback);

  DirichletParams prior = config.prior.resolve(config.currencies);
  std::vector<double> state = prior.means();
  if (!spec.start_at_prior_mean) {
    rng::Stream init_rs(config.seed, 0, 0, rng::StreamTag::kSynthState);
    rng::dirichlet(init_rs, prior.a, state);
  }

  p.true_shares.start = config.start.next();
  p.true_shares.n_ccy = n;
  p.true_shares.values.resize(T * n);
  p.obs.start = config.start.next();
  p.obs.y.resize(T);
  p.obs.sigma.resize(T);
  p.equity_share.assign(T, spec.equity_share);

  // State path and the noiseless observation series.
  std::vector<double> clean(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (config.model.usd_share_var > 0.0) {
      rng::Stream trans_rs(config.seed, 0, std::uint32_t(t + 1),
                           rng::StreamTag::kSynthState);
      std::vector<double> next(n);
      transition_sample(state, usd, config.model, trans_rs, next);
      state = next;
    }
    std::copy(state.begin(), state.end(), p.true_shares.values.begin() + t * n);
    clean[t] = predict_observation(state, spec.equity_share, p.returns.eq_row(t),
                                   p.returns.bond_row(t), p.returns.fx_row(t));
  }

  // Unit-scale noise draws, scaled per the configured mode.
  rng::Stream noise_rs(config.seed, 0, 1, rng::StreamTag::kSynthNoise);
  std::vector<double> unit(T);
  for (std::size_t t = 0; t < T; ++t)
    unit[t] = draw_noise(noise_rs, config.model.obs_dist, 1.0);

  if (spec.noise_mode == SynthSpec::NoiseMode::kFixed) {
    for (std::size_t t = 0; t < T; ++t) {
      p.obs.sigma[t] = spec.noise_sigma;
      p.obs.y[t] = clean[t] + spec.noise_sigma * unit[t];
    }
  } else {
    // Solve for the scale multiplier the SDR/IQR rule recovers from the
    // finished series, so re-deriving sigma from the files reproduces the
    // generating scales exactly.
    Quarter first = p.obs.start;
    Quarter last = Quarter::from_index(first.index() + int(T) - 1);
    std::vector<double> vol = sdr_quarterly_vol(out.market.sdr, first, last);
    double mean_vol = 0.0;
    for (double v : vol) mean_vol += v;
    mean_vol /= double(T);
    if (!(mean_vol > 0.0))
      throw NumericError("synthetic SDR series has zero volatility");

    std::vector<double> abs_y(T);
    auto half_iqr_at = [&](double m) {
      for (std::size_t t = 0; t < T; ++t)
        abs_y[t] = std::abs(clean[t] + m * vol[t] * unit[t]);
      return (linear_quantile(abs_y, 0.75) - linear_quantile(abs_y, 0.25)) / 2.0;
    };
    double m = half_iqr_at(0.0) / mean_vol;
    for (int pass = 0; pass < 200; ++pass) {
      double next = half_iqr_at(m) / mean_vol;
      if (std::abs(next - m) <= 1e-14 * std::max(1.0, m)) {
        m = next;
        break;
      }
      m = next;
    }
    if (!(m > 0.0))
      throw NumericError("synthetic noise scale iteration failed");
    for (std::size_t t = 0; t < T; ++t) {
      p.obs.sigma[t] = m * vol[t];
      p.obs.y[t] = clean[t] + p.obs.sigma[t] * unit[t];
    }
  }

  p.reserves.start = config.start;
  p.reserves.stock.resize(T + 1);
  p.reserves.purchases.assign(T + 1, 0.0);
  p.reserves.stock[0] = kInitialStock;
  for (std::size_t t = 0; t < T; ++t) {
    double purchase_rate = spec.purchase_mean + spec.purchase_vol * noise_rs.normal();
    double prev = p.reserves.stock[t];
    p.reserves.purchases[t + 1] = purchase_rate * prev;
    p.reserves.stock[t + 1] = prev * (1.0 + purchase_rate + p.obs.y[t]);
    if (!(p.reserves.stock[t + 1] > 0.0))
      throw NumericError("synthetic reserve stock went nonpositive");
  }

  // COFER stand-in weights: prior means scaled down to leave a 2% residual
  // bucket that the loader renormalizes away.
  out.cofer.start = config.start;
  out.cofer.n_ccy = n;
  out.cofer.values.resize((T + 1) * n);
  std::vector<double> world = prior.means();
  for (std::size_t t = 0; t <= T; ++t)
    for (std::size_t i = 0; i < n; ++i)
      out.cofer.values[t * n + i] = world[i] * 0.98;

  // Annual reported truth, sparse like real self-reports.
  for (std::size_t t = 3; t < T; t += 4) {
    Quarter q = p.true_shares.start;
    std::vector<double> row(p.true_shares.row(t).begin(),
                            p.true_shares.row(t).end());
    out.reported[Quarter::from_index(q.index() + int(t))] = row;
  }
  return out;
}

}  // namespace

FilterData SynthPanel::filter_data(const RunConfig& config) const {
  FilterData data;
  data.obs = obs;
  data.returns = returns;
  data.equity_share = equity_share;
  data.prior = config.prior.resolve(config.currencies);
  return data;
}

SynthPanel simulate_panel(const RunConfig& config, const SynthSpec& spec) {
  return generate(config, spec).panel;
}

void write_synthetic_dataset(const std::filesystem::path& dir,
                             const RunConfig& config, const SynthSpec& spec) {
  FullSynth full = generate(config, spec);

  CountryDataset dataset;
  dataset.currencies = config.currencies;
  dataset.start = config.start;
  dataset.end = Quarter::from_index(config.start.index() + spec.quarters);
  dataset.reserves = full.panel.reserves;
  dataset.market = full.market;
  dataset.reported = full.reported;
  write_dataset(dir, dataset);  // cofer left empty, written with its residual row

  csv::Writer cofer(dir / "cofer.csv", {"quarter", "currency", "share"});
  for (std::size_t t = 0; t < full.cofer.size(); ++t) {
    Quarter q = Quarter::from_index(full.cofer.start.index() + int(t));
    for (std::size_t i = 0; i < config.currencies.size(); ++i) {
      cofer.field(q.str());
      cofer.field(config.currencies.code(i));
      cofer.field(full.cofer.values[t * config.currencies.size() + i]);
      cofer.end_row();
    }
    cofer.field(q.str());
    cofer.field("OTH");
    cofer.field(0.02);
    cofer.end_row();
  }
  cofer.close();

  csv::Writer truth(dir / "true_shares.csv", {"quarter", "currency", "share"});
  for (std::size_t t = 0; t < full.panel.true_shares.size(); ++t) {
    Quarter q = Quarter::from_index(full.panel.true_shares.start.index() + int(t));
    for (std::size_t i = 0; i < config.currencies.size(); ++i) {
      truth.field(q.str());
      truth.field(config.currencies.code(i));
      truth.field(full.panel.true_shares.values[t * config.currencies.size() + i]);
      truth.end_row();
    }
  }
  truth.close();

  csv::Writer xeq(dir / "true_equity_share.csv", {"quarter", "equity_share"});
  for (std::size_t t = 0; t < full.panel.obs.size(); ++t) {
    xeq.field(full.panel.obs.quarter(t).str());
    xeq.field(full.panel.equity_share[t]);
    xeq.end_row();
  }
  xeq.close();
}

}  // namespace reserves
